use std::fmt;

use serde::Serialize;

use crate::term::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RedexKind {
    Beta,
    Proj,
    Delta,
    Cross,
    Simplify,
}

impl RedexKind {
    pub fn is_intuitionistic(self) -> bool {
        matches!(self, RedexKind::Beta | RedexKind::Proj | RedexKind::Delta)
    }
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RedexKind::Beta => "beta",
            RedexKind::Proj => "proj",
            RedexKind::Delta => "delta",
            RedexKind::Cross => "cross",
            RedexKind::Simplify => "simplify",
        })
    }
}

/// Where a step happened. Process and thread numbers are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    At(Path),
    Cross {
        receiver: usize,
        /// Receiving threads with the path to each `a? v` inside them.
        threads: Vec<(usize, Path)>,
        senders: Vec<usize>,
    },
    Simplify { kept: Vec<(usize, usize)> },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::At(p) => write!(f, "{p}"),
            Location::Cross { receiver, threads, senders } => {
                let from: Vec<String> = senders.iter().map(ToString::to_string).collect();
                let at: Vec<String> = threads.iter().map(|(t, p)| format!("t{t}:{p}")).collect();
                write!(f, "to p{receiver} from [{}] at {}", from.join(", "), at.join(" "))
            }
            Location::Simplify { kept } => {
                let parts: Vec<String> = kept.iter().map(|(p, t)| format!("p{p}t{t}")).collect();
                write!(f, "keep {}", parts.join(" "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RedexDescriptor {
    pub kind: RedexKind,
    pub location: Location,
}

impl fmt::Display for RedexDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.location)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub step: usize,
    pub kind: RedexKind,
    pub location: String,
    /// Pretty-printed term after the step.
    pub term: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TraceMode {
    Off,
    #[default]
    On,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// One line per event: step, rule, location, term.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&format!("{:>4} {:<8} {} :: {}\n", e.step, e.kind.to_string(), e.location, e.term));
        }
        out
    }

    /// JSON lines with fields `step`, `kind`, `location`, `term`.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("plain data serializes"));
            out.push('\n');
        }
        out
    }

    pub fn kinds(&self) -> Vec<RedexKind> {
        self.events.iter().map(|e| e.kind).collect()
    }
}
