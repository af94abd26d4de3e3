//! Event file formats: a metadata-headed CSV and the `evb` binary layout.
//!
//! CSV: first line `# width=<W> height=<H>`, then `x,y,t,p` rows with t
//! printed to 9 decimal digits.
//!
//! evb: magic `EVB1`, u32 width, u32 height, u64 count, then per-event
//! records {u16 x, u16 y, f64 t, i8 p, 3 pad bytes}, all little-endian.

use super::{Event, EventStream};
use crate::error::{Error, Result};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventFormat {
    Csv,
    Evb,
}

impl std::str::FromStr for EventFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(EventFormat::Csv),
            "evb" => Ok(EventFormat::Evb),
            other => Err(Error::validation(format!("unknown event format '{other}'"))),
        }
    }
}

pub fn load_events(path: &Path, format: EventFormat) -> Result<EventStream> {
    match format {
        EventFormat::Csv => load_csv(path),
        EventFormat::Evb => load_evb(path),
    }
}

pub fn save_events(stream: &EventStream, path: &Path, format: EventFormat) -> Result<()> {
    match format {
        EventFormat::Csv => save_csv(stream, path),
        EventFormat::Evb => save_evb(stream, path),
    }
}

fn load_csv(path: &Path) -> Result<EventStream> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "missing header".into() })??;
    let (width, height) = parse_header(&header)?;

    let mut events = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let mut field = |name: &str| {
            fields.next().map(str::trim).ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("missing field '{name}'"),
            })
        };
        let x = parse_num::<u16>(field("x")?, lineno)?;
        let y = parse_num::<u16>(field("y")?, lineno)?;
        let t = parse_num::<f64>(field("t")?, lineno)?;
        let p = parse_num::<i8>(field("p")?, lineno)?;
        events.push(Event::new(x, y, t, p));
    }
    EventStream::new(events, width, height)
}

fn parse_header(header: &str) -> Result<(u32, u32)> {
    let err = || Error::Parse {
        line: 1,
        msg: format!("bad header '{header}', expected '# width=<W> height=<H>'"),
    };
    let rest = header.strip_prefix('#').ok_or_else(err)?;
    let mut width = None;
    let mut height = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("width=") {
            width = v.parse::<u32>().ok();
        } else if let Some(v) = tok.strip_prefix("height=") {
            height = v.parse::<u32>().ok();
        }
    }
    match (width, height) {
        (Some(w), Some(h)) => Ok((w, h)),
        _ => Err(err()),
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse::<T>().map_err(|_| Error::Parse {
        line,
        msg: format!("malformed value '{s}'"),
    })
}

fn save_csv(stream: &EventStream, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# width={} height={}", stream.width(), stream.height())?;
    for e in stream.events() {
        writeln!(w, "{},{},{:.9},{}", e.x, e.y, e.t, e.p)?;
    }
    w.flush()?;
    Ok(())
}

const EVB_MAGIC: &[u8; 4] = b"EVB1";

fn save_evb(stream: &EventStream, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(EVB_MAGIC)?;
    w.write_all(&stream.width().to_le_bytes())?;
    w.write_all(&stream.height().to_le_bytes())?;
    w.write_all(&(stream.len() as u64).to_le_bytes())?;
    for e in stream.events() {
        w.write_all(&e.x.to_le_bytes())?;
        w.write_all(&e.y.to_le_bytes())?;
        w.write_all(&e.t.to_le_bytes())?;
        w.write_all(&e.p.to_le_bytes())?;
        w.write_all(&[0u8; 3])?;
    }
    w.flush()?;
    Ok(())
}

fn load_evb(path: &Path) -> Result<EventStream> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Parse { line: 0, msg: "truncated evb header".into() })?;
    if &magic != EVB_MAGIC {
        return Err(Error::Parse { line: 0, msg: "bad evb magic".into() });
    }
    let width = read_u32(&mut r)?;
    let height = read_u32(&mut r)?;
    let count = read_u64(&mut r)?;
    let mut events = Vec::with_capacity(count.min(1 << 24) as usize);
    let mut rec = [0u8; 16];
    for i in 0..count {
        r.read_exact(&mut rec).map_err(|_| Error::Parse {
            line: i as usize,
            msg: "truncated evb record".into(),
        })?;
        events.push(Event {
            x: u16::from_le_bytes([rec[0], rec[1]]),
            y: u16::from_le_bytes([rec[2], rec[3]]),
            t: f64::from_le_bytes(rec[4..12].try_into().unwrap()),
            p: rec[12] as i8,
        });
    }
    EventStream::new(events, width, height)
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn csv_single_event() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("e.csv");
        std::fs::write(&path, "# width=2 height=2\n0,0,0.001,1\n").unwrap();
        let s = load_events(&path, EventFormat::Csv).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.events()[0], Event::new(0, 0, 0.001, 1));
    }

    #[test]
    fn csv_empty_body_is_valid() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("e.csv");
        std::fs::write(&path, "# width=2 height=2\n").unwrap();
        let s = load_events(&path, EventFormat::Csv).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn csv_out_of_bounds_record() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("e.csv");
        std::fs::write(&path, "# width=2 height=2\n5,0,0.1,1\n").unwrap();
        assert!(matches!(load_events(&path, EventFormat::Csv), Err(Error::Validation(_))));
    }

    #[test]
    fn csv_malformed_record_reports_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("e.csv");
        std::fs::write(&path, "# width=2 height=2\n0,0,0.1,1\n0,zzz,0.2,1\n").unwrap();
        match load_events(&path, EventFormat::Csv) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn evb_round_trip_bit_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("e.evb");
        let s = EventStream::new(
            vec![
                Event::new(0, 0, 0.1, 1),
                Event::new(1, 1, 0.2, -1),
                Event::new(0, 1, 0.2, 1),
            ],
            2,
            2,
        )
        .unwrap();
        save_events(&s, &path, EventFormat::Evb).unwrap();
        assert_eq!(load_events(&path, EventFormat::Evb).unwrap(), s);
    }

    #[test]
    fn evb_empty_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("e.evb");
        let s = EventStream::new(vec![], 4, 3).unwrap();
        save_events(&s, &path, EventFormat::Evb).unwrap();
        let loaded = load_events(&path, EventFormat::Evb).unwrap();
        assert_eq!(loaded, s);
        assert_eq!(loaded.width(), 4);
    }

    #[test]
    fn csv_round_trip_within_tolerance() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("e.csv");
        let s = EventStream::new(vec![Event::new(1, 0, 0.123456789123, 1)], 2, 2).unwrap();
        save_events(&s, &path, EventFormat::Csv).unwrap();
        let loaded = load_events(&path, EventFormat::Csv).unwrap();
        assert!((loaded.events()[0].t - 0.123456789123).abs() < 1e-9);
    }

    #[test]
    fn save_to_unwritable_path_errors() {
        let s = EventStream::new(vec![], 2, 2).unwrap();
        let err = save_events(&s, Path::new("/nonexistent-dir/e.evb"), EventFormat::Evb);
        assert!(matches!(err, Err(Error::Io(_))));
    }
}
