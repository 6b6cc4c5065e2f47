//! Canonical frequency-table CSV.
//!
//! Header `contributor_id,count`, UTF-8, LF line endings, rows ordered by
//! descending count then ascending id. Row numbers in errors are 1-based and
//! count the header as row 1.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::freqtable::FrequencyTable;

pub const TABLE_HEADER: [&str; 2] = ["contributor_id", "count"];

pub fn write_table<W: Write>(table: &FrequencyTable, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let to_io = |e: csv::Error| Error::Io(e.into());
    w.write_record(TABLE_HEADER).map_err(to_io)?;
    for (id, count) in table.ranked() {
        w.write_record([id, count.to_string().as_str()])
            .map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_table(table: &FrequencyTable, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_table(table, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn read_table<R: Read>(reader: R) -> Result<FrequencyTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let parse_err = |row: usize, message: String| Error::Parse { row, message };
    match records.next() {
        None => return Err(parse_err(1, "missing header".into())),
        Some(header) => {
            let header = header.map_err(|e| parse_err(1, e.to_string()))?;
            if header.iter().ne(TABLE_HEADER) {
                return Err(parse_err(
                    1,
                    format!(
                        "expected header {:?}, found {:?}",
                        TABLE_HEADER.join(","),
                        header
                    ),
                ));
            }
        }
    }

    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for (i, record) in records.enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| parse_err(row, e.to_string()))?;
        if record.len() != 2 {
            return Err(parse_err(
                row,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        let id = &record[0];
        let count: i128 = record[1]
            .trim()
            .parse()
            .map_err(|_| parse_err(row, format!("count {:?} is not an integer", &record[1])))?;
        if count < 1 || count > u64::MAX as i128 {
            return Err(Error::InvalidCount {
                id: id.to_owned(),
                count,
                row: Some(row),
            });
        }
        if !seen.insert(id.to_owned()) {
            return Err(Error::DuplicateId {
                id: id.to_owned(),
                row: Some(row),
            });
        }
        pairs.push((id.to_owned(), count as u64));
    }
    FrequencyTable::from_counts(pairs)
}

pub fn load_table(path: &Path) -> Result<FrequencyTable> {
    read_table(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(t: &FrequencyTable) -> String {
        let mut out = Vec::new();
        write_table(t, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn canonical_layout() {
        let t =
            FrequencyTable::from_counts([("b", 3), ("c", 5), ("a", 3), ("d,quoted", 1)]).unwrap();
        assert_eq!(
            render(&t),
            "contributor_id,count\nc,5\na,3\nb,3\n\"d,quoted\",1\n"
        );
    }

    #[test]
    fn round_trip() {
        let t = FrequencyTable::from_counts([("x", 10), ("y \"q\"", 2), ("zé", 7)]).unwrap();
        let text = render(&t);
        assert_eq!(read_table(text.as_bytes()).unwrap(), t);
    }

    #[test]
    fn header_only_is_empty() {
        let err = read_table("contributor_id,count\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::EmptyTable));
    }

    #[test]
    fn zero_count_row() {
        let err = read_table("contributor_id,count\na,0\n".as_bytes()).unwrap_err();
        assert!(
            matches!(
                err,
                Error::InvalidCount {
                    row: Some(2),
                    count: 0,
                    ..
                }
            ),
            "{err}"
        );
        let err = read_table("contributor_id,count\na,4\nb,-3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::InvalidCount { row: Some(3), .. }));
    }

    #[test]
    fn malformed_rows() {
        for (text, row) in [
            ("", 1),
            ("id,count\na,1\n", 1),
            ("contributor_id,count\na,1\nb\n", 3),
            ("contributor_id,count\na,x\n", 2),
            ("contributor_id,count\na,1.5\n", 2),
        ] {
            match read_table(text.as_bytes()) {
                Err(Error::Parse { row: r, .. }) => assert_eq!(r, row, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn duplicate_rows() {
        let err = read_table("contributor_id,count\na,1\nb,2\na,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DuplicateId { row: Some(4), .. }));
    }

    #[test]
    fn accepts_crlf() {
        let t = read_table("contributor_id,count\r\na,2\r\n".as_bytes()).unwrap();
        assert_eq!(t.get("a"), Some(2));
    }
}
