use std::io::BufRead;

use super::event::{Event, EventError};
use super::TraceError;

/// Qualified-name prefixes restricting which units produce events.
///
/// A pattern ending in `*` matches any name starting with the text before
/// the star. A pattern without a star matches the name itself or any name
/// nested below it (`phil` matches `phil.Philo` but not `philosophy.X`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InclusionFilter {
    patterns: Vec<String>,
}

impl InclusionFilter {
    pub fn new<I, S>(patterns: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        InclusionFilter {
            patterns: patterns.into_iter().map(Into::into).collect(),
        }
    }

    pub fn include_all() -> Self {
        InclusionFilter::default()
    }

    pub fn push(&mut self, pattern: impl Into<String>) {
        self.patterns.push(pattern.into());
    }

    pub fn patterns(&self) -> &[String] {
        &self.patterns
    }

    pub fn matches(&self, name: &str) -> bool {
        if self.patterns.is_empty() {
            return true;
        }
        self.patterns.iter().any(|p| match p.strip_suffix('*') {
            Some(prefix) => name.starts_with(prefix),
            None => {
                name == p
                    || (name.len() > p.len()
                        && name.starts_with(p.as_str())
                        && name.as_bytes()[p.len()] == b'.')
            }
        })
    }

    pub fn admits(&self, event: &Event) -> bool {
        self.matches(event.unit_name())
    }
}

/// Streaming reader over newline-delimited trace records.
///
/// Sequence numbers are checked on every record, including the ones the
/// filter drops, so a reordered trace is rejected regardless of filtering.
pub struct TraceReader<R> {
    source: R,
    filter: InclusionFilter,
    line_no: usize,
    last_seq: Option<u64>,
    buf: String,
    failed: bool,
}

impl<R: BufRead> TraceReader<R> {
    pub fn new(source: R, filter: InclusionFilter) -> Self {
        TraceReader {
            source,
            filter,
            line_no: 0,
            last_seq: None,
            buf: String::new(),
            failed: false,
        }
    }
}

impl<R: BufRead> Iterator for TraceReader<R> {
    type Item = Result<Event, TraceError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            self.buf.clear();
            match self.source.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    self.failed = true;
                    return Some(Err(TraceError::Io(e)));
                }
            }
            self.line_no += 1;
            let line = self.buf.trim();
            if line.is_empty() {
                continue;
            }
            let event = match Event::parse(line) {
                Ok(ev) => ev,
                Err(source) => {
                    self.failed = true;
                    return Some(Err(TraceError::Decode {
                        line: self.line_no,
                        source,
                    }));
                }
            };
            if let Some(prev) = self.last_seq {
                if event.seq <= prev {
                    self.failed = true;
                    return Some(Err(TraceError::OutOfOrder {
                        line: self.line_no,
                        prev,
                        seq: event.seq,
                    }));
                }
            }
            self.last_seq = Some(event.seq);
            if self.filter.admits(&event) {
                return Some(Ok(event));
            }
        }
    }
}

/// Reads a whole trace, stopping at the first error.
pub fn read_trace<R: BufRead>(source: R, filter: &InclusionFilter) -> TraceReader<R> {
    TraceReader::new(source, filter.clone())
}

/// Convenience for decoding a single record with a line number attached.
pub fn parse_event_at(line: &str, line_no: usize) -> Result<Event, TraceError> {
    Event::parse(line).map_err(|source: EventError| TraceError::Decode {
        line: line_no,
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Value;

    fn write(seq: u64, class: &str) -> String {
        Event::field_write(seq, "main", class, Some(1), "x", Value::Int(1)).to_record()
    }

    #[test]
    fn prefix_filter_drops_other_units() {
        let text = [write(1, "phil.Philo"), write(2, "util.Log"), write(3, "phil.Philo")].join("\n");
        let filter = InclusionFilter::new(["phil.*"]);
        let events: Vec<_> = read_trace(text.as_bytes(), &filter)
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(events.len(), 2);
        assert!(events.iter().all(|e| e.unit_name() == "phil.Philo"));
    }

    #[test]
    fn empty_filter_includes_everything() {
        let text: Vec<String> = (1..=100).map(|i| write(i, "any.Thing")).collect();
        let n = read_trace(text.join("\n").as_bytes(), &InclusionFilter::include_all())
            .filter(|r| r.is_ok())
            .count();
        assert_eq!(n, 100);
    }

    #[test]
    fn out_of_order_seq_is_an_error() {
        let text = [write(5, "a.B"), write(4, "a.B")].join("\n");
        let results: Vec<_> = read_trace(text.as_bytes(), &InclusionFilter::default()).collect();
        let err = results[1].as_ref().unwrap_err();
        assert_eq!(err.to_string(), "line 2: out-of-order seq 4 after 5");
        assert_eq!(results.len(), 2);
    }

    #[test]
    fn bare_pattern_matches_nested_names_only() {
        let f = InclusionFilter::new(["phil"]);
        assert!(f.matches("phil"));
        assert!(f.matches("phil.Philo.eat"));
        assert!(!f.matches("philosophy.X"));
    }

    #[test]
    fn decode_error_carries_line_number() {
        let text = format!("{}\n\n{{\"seq\":0}}", write(1, "a.B"));
        let results: Vec<_> = read_trace(text.as_bytes(), &InclusionFilter::default()).collect();
        match results[1].as_ref().unwrap_err() {
            TraceError::Decode { line, .. } => assert_eq!(*line, 3),
            other => panic!("unexpected {other}"),
        }
    }
}
