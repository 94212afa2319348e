//! Versioned JSON documents: diagrams, chains, movies, towers, certificates.
//!
//! Every top-level document carries a `version` field and is rejected
//! without it. Nested documents carry their own version too, so any piece
//! can be cut out of a tower file and used on its own.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cobordism::{Movie, MovieEvent};
use crate::complex::{BigradedDims, ChainVector, LabeledSmoothing};
use crate::diagram::{Crossing, Diagram, EdgeId, Side, Sign};
use crate::error::{Error, Result};

pub const DIAGRAM_V1: &str = "diagram.v1";
pub const CHAIN_V1: &str = "chain.v1";
pub const MOVIE_V1: &str = "movie.v1";
pub const TOWER_V1: &str = "tower.v1";
pub const CERTIFICATE_V1: &str = "certificate.v1";

pub(crate) fn check_version(expected: &'static str, found: &Option<String>) -> Result<()> {
    if found.as_deref() == Some(expected) {
        Ok(())
    } else {
        Err(Error::Version {
            expected,
            found: found.clone(),
        })
    }
}

/// Parses JSON, reporting a missing or wrong `version` before any schema
/// complaint so that version errors are recognisable.
pub(crate) fn from_json<T: DeserializeOwned>(text: &str, expected: &'static str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let found = value
        .get("version")
        .and_then(|v| v.as_str())
        .map(str::to_owned);
    check_version(expected, &found)?;
    serde_json::from_value(value).map_err(|e| Error::Format(format!("{expected}: {e}")))
}

pub(crate) fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

// ---------------------------------------------------------------- diagrams

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingDoc {
    pub edges: [EdgeId; 4],
    pub sign: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramDoc {
    pub version: Option<String>,
    pub crossings: Vec<CrossingDoc>,
    #[serde(default)]
    pub free_circles: usize,
    /// Ids for the free circles; defaults to the lowest ids not used by
    /// crossings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_circle_edges: Option<Vec<EdgeId>>,
    /// Per crossing, the slots the over strand enters and leaves by. This
    /// is the only orientation data a PD code does not already imply, and
    /// it must agree with the sign.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientations: Option<Vec<[usize; 2]>>,
}

impl DiagramDoc {
    pub fn from_diagram(d: &Diagram) -> Self {
        DiagramDoc {
            version: Some(DIAGRAM_V1.into()),
            crossings: d
                .crossings()
                .iter()
                .map(|c| CrossingDoc {
                    edges: c.edges,
                    sign: c.sign.as_i64(),
                })
                .collect(),
            free_circles: d.free_circles().len(),
            free_circle_edges: (!d.free_circles().is_empty()).then(|| d.free_circles().to_vec()),
            orientations: None,
        }
    }

    pub fn to_diagram(&self) -> Result<Diagram> {
        check_version(DIAGRAM_V1, &self.version)?;
        let mut crossings = Vec::with_capacity(self.crossings.len());
        for (i, c) in self.crossings.iter().enumerate() {
            let sign = Sign::from_i64(c.sign).ok_or_else(|| {
                Error::Format(format!(
                    "crossing {i}: sign must be +1 or -1, got {}",
                    c.sign
                ))
            })?;
            crossings.push(Crossing::new(c.edges, sign));
        }
        if let Some(or) = &self.orientations {
            if or.len() != crossings.len() {
                return Err(Error::Format(format!(
                    "{} orientations for {} crossings",
                    or.len(),
                    crossings.len()
                )));
            }
            for (i, (&dir, c)) in or.iter().zip(&crossings).enumerate() {
                let implied = match dir {
                    [3, 1] => Sign::Pos,
                    [1, 3] => Sign::Neg,
                    other => {
                        return Err(Error::Format(format!(
                            "crossing {i}: over strand runs {other:?}, expected [3,1] or [1,3]"
                        )))
                    }
                };
                if implied != c.sign {
                    return Err(Error::InvalidDiagram(format!(
                        "sign/orientation mismatch at crossing {i}"
                    )));
                }
            }
        }
        let free = match &self.free_circle_edges {
            Some(ids) => {
                if ids.len() != self.free_circles {
                    return Err(Error::Format(format!(
                        "free_circles is {} but {} free circle edges are listed",
                        self.free_circles,
                        ids.len()
                    )));
                }
                ids.clone()
            }
            None => {
                let used: std::collections::BTreeSet<EdgeId> =
                    crossings.iter().flat_map(|c| c.edges).collect();
                (0..)
                    .filter(|e| !used.contains(e))
                    .take(self.free_circles)
                    .collect()
            }
        };
        Diagram::new(crossings, free)
    }
}

pub fn parse_diagram(text: &str) -> Result<Diagram> {
    from_json::<DiagramDoc>(text, DIAGRAM_V1)?.to_diagram()
}

pub fn serialize_diagram(d: &Diagram) -> String {
    to_json(&DiagramDoc::from_diagram(d))
}

// ------------------------------------------------------------------ chains

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub smoothing: Vec<u8>,
    pub labels: Vec<u8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDoc {
    pub version: Option<String>,
    pub terms: Vec<TermDoc>,
}

fn bits(v: &[u8], what: &str) -> Result<Vec<u8>> {
    match v.iter().find(|&&b| b > 1) {
        Some(b) => Err(Error::Format(format!(
            "{what} bits must be 0 or 1, got {b}"
        ))),
        None => Ok(v.to_vec()),
    }
}

impl ChainDoc {
    pub fn from_chain(c: &ChainVector) -> Self {
        ChainDoc {
            version: Some(CHAIN_V1.into()),
            terms: c
                .terms()
                .map(|g| TermDoc {
                    smoothing: g.smoothing.to_bits(),
                    labels: g.labels.to_bits(),
                })
                .collect(),
        }
    }

    pub fn to_chain(&self) -> Result<ChainVector> {
        check_version(CHAIN_V1, &self.version)?;
        let mut c = ChainVector::zero();
        for t in &self.terms {
            let g = LabeledSmoothing::from_bits(
                &bits(&t.smoothing, "smoothing")?,
                &bits(&t.labels, "label")?,
            );
            if c.contains(&g) {
                return Err(Error::Format(format!("generator listed twice: {g:?}")));
            }
            c.add(g);
        }
        Ok(c)
    }
}

pub fn parse_chain(text: &str) -> Result<ChainVector> {
    from_json::<ChainDoc>(text, CHAIN_V1)?.to_chain()
}

pub fn serialize_chain(c: &ChainVector) -> String {
    to_json(&ChainDoc::from_chain(c))
}

// ------------------------------------------------------------------ events

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideDoc {
    Left,
    Right,
}

impl From<SideDoc> for Side {
    fn from(s: SideDoc) -> Side {
        match s {
            SideDoc::Left => Side::Left,
            SideDoc::Right => Side::Right,
        }
    }
}

impl From<Side> for SideDoc {
    fn from(s: Side) -> SideDoc {
        match s {
            Side::Left => SideDoc::Left,
            Side::Right => SideDoc::Right,
        }
    }
}

/// An event with sites of type `S`: plain edge ids in movies, symbolic
/// references in tower patterns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventDoc<S> {
    pub kind: String,
    #[serde(default = "Vec::new")]
    pub site: Vec<S>,
    /// Loop side for `r1+`/`r1-`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<SideDoc>,
    /// Face sides of the over and under edge for `r2+`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sides: Option<[Option<SideDoc>; 2]>,
    /// Part order for an `r2+` of an edge across itself.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub over_first: bool,
}

impl<S: Clone> EventDoc<S> {
    /// Resolves sites with `f` and builds the event.
    pub fn resolve(&self, mut f: impl FnMut(&S) -> Result<EdgeId>) -> Result<MovieEvent> {
        let site = self
            .site
            .iter()
            .map(&mut f)
            .collect::<Result<Vec<EdgeId>>>()?;
        let arity = |n: usize| -> Result<()> {
            if site.len() == n {
                Ok(())
            } else {
                Err(Error::Format(format!(
                    "event {} takes {n} site edge(s), got {}",
                    self.kind,
                    site.len()
                )))
            }
        };
        let side = || {
            self.side
                .map(Side::from)
                .ok_or_else(|| Error::Format(format!("event {} needs a side", self.kind)))
        };
        let ev = match self.kind.as_str() {
            "birth" => {
                arity(0)?;
                MovieEvent::Birth
            }
            "death" => {
                arity(1)?;
                MovieEvent::Death { edge: site[0] }
            }
            "saddle" => {
                arity(2)?;
                MovieEvent::Saddle {
                    a: site[0],
                    b: site[1],
                }
            }
            "r1+" | "r1-" => {
                arity(1)?;
                MovieEvent::R1Add {
                    edge: site[0],
                    sign: if self.kind == "r1+" {
                        Sign::Pos
                    } else {
                        Sign::Neg
                    },
                    side: side()?,
                }
            }
            "r1+inv" | "r1-inv" => {
                arity(1)?;
                MovieEvent::R1Remove {
                    edge: site[0],
                    sign: if self.kind == "r1+inv" {
                        Sign::Pos
                    } else {
                        Sign::Neg
                    },
                }
            }
            "r2+" => {
                arity(2)?;
                let [o, u] = self.sides.unwrap_or([None, None]);
                MovieEvent::R2Add {
                    over: site[0],
                    under: site[1],
                    over_side: o.map(Side::from),
                    under_side: u.map(Side::from),
                    over_first: self.over_first,
                }
            }
            "r2-" => {
                arity(2)?;
                MovieEvent::R2Remove {
                    a: site[0],
                    b: site[1],
                }
            }
            "r3" => {
                arity(3)?;
                MovieEvent::R3 {
                    edges: [site[0], site[1], site[2]],
                }
            }
            other => return Err(Error::Format(format!("unknown event kind {other:?}"))),
        };
        Ok(ev)
    }
}

impl EventDoc<EdgeId> {
    pub fn from_event(e: &MovieEvent) -> Self {
        let over_first = matches!(
            *e,
            MovieEvent::R2Add {
                over_first: true,
                ..
            }
        );
        let (site, side, sides) = match *e {
            MovieEvent::Birth => (vec![], None, None),
            MovieEvent::Death { edge } => (vec![edge], None, None),
            MovieEvent::Saddle { a, b } => (vec![a, b], None, None),
            MovieEvent::R1Add { edge, side, .. } => (vec![edge], Some(side.into()), None),
            MovieEvent::R1Remove { edge, .. } => (vec![edge], None, None),
            MovieEvent::R2Add {
                over,
                under,
                over_side,
                under_side,
                ..
            } => (
                vec![over, under],
                None,
                Some([over_side.map(Into::into), under_side.map(Into::into)]),
            ),
            MovieEvent::R2Remove { a, b } => (vec![a, b], None, None),
            MovieEvent::R3 { edges } => (edges.to_vec(), None, None),
        };
        EventDoc {
            kind: e.kind().into(),
            site,
            side,
            sides,
            over_first,
        }
    }
}

// ------------------------------------------------------------------ movies

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovieDoc {
    pub version: Option<String>,
    pub source: DiagramDoc,
    pub events: Vec<EventDoc<EdgeId>>,
}

impl MovieDoc {
    pub fn from_movie(m: &Movie) -> Self {
        MovieDoc {
            version: Some(MOVIE_V1.into()),
            source: DiagramDoc::from_diagram(&m.source),
            events: m.events.iter().map(EventDoc::from_event).collect(),
        }
    }

    /// Builds the movie and checks that it replays.
    pub fn to_movie(&self) -> Result<Movie> {
        check_version(MOVIE_V1, &self.version)?;
        let source = self.source.to_diagram()?;
        let events = self
            .events
            .iter()
            .map(|e| e.resolve(|&x| Ok(x)))
            .collect::<Result<Vec<_>>>()?;
        let m = Movie::new(source, events);
        m.replay()?;
        Ok(m)
    }
}

pub fn parse_movie(text: &str) -> Result<Movie> {
    from_json::<MovieDoc>(text, MOVIE_V1)?.to_movie()
}

pub fn serialize_movie(m: &Movie) -> String {
    to_json(&MovieDoc::from_movie(m))
}

// ------------------------------------------------------------ dims, reports

/// `[h, q, dim]` triples in lexicographic order, zero entries omitted.
pub fn dims_to_json(d: &BigradedDims) -> serde_json::Value {
    serde_json::Value::from(
        d.triples()
            .into_iter()
            .map(|(h, q, v)| serde_json::json!([h, q, v]))
            .collect::<Vec<_>>(),
    )
}

pub fn dims_from_json(v: &serde_json::Value) -> Result<BigradedDims> {
    let t: Vec<(i64, i64, usize)> = serde_json::from_value(v.clone())?;
    Ok(BigradedDims::from_triples(&t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::examples::*;

    #[test]
    fn zero_crossing_unknot_document() {
        let d =
            parse_diagram(r#"{"version":"diagram.v1","crossings":[],"free_circles":1}"#).unwrap();
        assert_eq!(d, Diagram::unknot());
    }

    #[test]
    fn positive_kink_document() {
        let d = parse_diagram(
            r#"{"version":"diagram.v1","crossings":[{"edges":[1,1,2,2],"sign":1}],"orientations":[[3,1]]}"#,
        )
        .unwrap();
        assert_eq!((d.n_pos(), d.n_neg()), (1, 0));
    }

    #[test]
    fn rejected_documents() {
        let missing = r#"{"crossings":[],"free_circles":1}"#;
        assert!(matches!(
            parse_diagram(missing),
            Err(Error::Version { found: None, .. })
        ));
        let triple = r#"{"version":"diagram.v1","crossings":[{"edges":[1,1,1,2],"sign":1}]}"#;
        assert!(parse_diagram(triple)
            .unwrap_err()
            .to_string()
            .contains("3 times"));
        let flipped = r#"{"version":"diagram.v1","crossings":[{"edges":[1,1,2,2],"sign":1}],"orientations":[[1,3]]}"#;
        assert!(parse_diagram(flipped)
            .unwrap_err()
            .to_string()
            .contains("sign/orientation mismatch"));
        let sign = r#"{"version":"diagram.v1","crossings":[{"edges":[1,1,2,2],"sign":0}]}"#;
        assert!(parse_diagram(sign).is_err());
        assert!(
            parse_chain(r#"{"version":"chain.v1","terms":[{"smoothing":[2],"labels":[]}]}"#)
                .is_err()
        );
    }

    #[test]
    fn round_trips() {
        for d in [
            Diagram::empty(),
            Diagram::unknot(),
            positive_hopf(),
            left_trefoil(),
        ] {
            assert_eq!(parse_diagram(&serialize_diagram(&d)).unwrap(), d);
        }
        let c: ChainVector = [
            LabeledSmoothing::from_bits(&[0, 1], &[1]),
            LabeledSmoothing::from_bits(&[1, 1], &[0, 1]),
        ]
        .into_iter()
        .collect();
        assert_eq!(parse_chain(&serialize_chain(&c)).unwrap(), c);
        let m = Movie::new(
            Diagram::unknot(),
            vec![
                MovieEvent::R1Add {
                    edge: 0,
                    sign: Sign::Neg,
                    side: Side::Left,
                },
                MovieEvent::Birth,
                MovieEvent::R2Add {
                    over: 2,
                    under: 1,
                    over_side: None,
                    under_side: None,
                    over_first: false,
                },
            ],
        );
        assert_eq!(parse_movie(&serialize_movie(&m)).unwrap(), m);
    }

    #[test]
    fn dims_are_sorted_triples() {
        let d = BigradedDims::from_triples(&[(0, 1, 1), (-2, -5, 1), (0, -1, 1)]);
        let v = dims_to_json(&d);
        assert_eq!(v.to_string(), "[[-2,-5,1],[0,-1,1],[0,1,1]]");
        assert_eq!(dims_from_json(&v).unwrap(), d);
    }
}
