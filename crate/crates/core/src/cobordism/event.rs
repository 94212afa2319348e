use crate::diagram::{EdgeId, Side, Sign};

/// One elementary piece of a movie. Sites name edges of the diagram the
/// event is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MovieEvent {
    /// New crossingless circle.
    Birth,
    /// Removes the free circle `edge`.
    Death { edge: EdgeId },
    /// Band joining edges `a` and `b`; `a == b` splits off a circle.
    Saddle { a: EdgeId, b: EdgeId },
    /// Adds a kink of the given sign on `edge`, with the loop on `side`.
    R1Add {
        edge: EdgeId,
        sign: Sign,
        side: Side,
    },
    /// Removes the kink whose loop is `edge`.
    R1Remove { edge: EdgeId, sign: Sign },
    /// Pushes a finger of `over` across `under`. Sides name the shared face
    /// relative to each edge's orientation; `None` picks the first shared
    /// face found. When `over == under` the edge is pushed across itself
    /// and `over_first` says which part comes first along it.
    R2Add {
        over: EdgeId,
        under: EdgeId,
        over_side: Option<Side>,
        under_side: Option<Side>,
        over_first: bool,
    },
    /// Cancels the bigon bounded by edges `a` and `b`.
    R2Remove { a: EdgeId, b: EdgeId },
    /// Slides the over-most strand across the opposite crossing of the
    /// triangular face bounded by `edges`.
    R3 { edges: [EdgeId; 3] },
}

impl MovieEvent {
    /// Kind name as used in movie files.
    pub fn kind(&self) -> &'static str {
        match self {
            MovieEvent::Birth => "birth",
            MovieEvent::Death { .. } => "death",
            MovieEvent::Saddle { .. } => "saddle",
            MovieEvent::R1Add {
                sign: Sign::Pos, ..
            } => "r1+",
            MovieEvent::R1Add {
                sign: Sign::Neg, ..
            } => "r1-",
            MovieEvent::R1Remove {
                sign: Sign::Pos, ..
            } => "r1+inv",
            MovieEvent::R1Remove {
                sign: Sign::Neg, ..
            } => "r1-inv",
            MovieEvent::R2Add { .. } => "r2+",
            MovieEvent::R2Remove { .. } => "r2-",
            MovieEvent::R3 { .. } => "r3",
        }
    }

    /// The same event with every site edge renamed by `f`.
    pub fn map_edges(&self, f: impl Fn(EdgeId) -> EdgeId) -> MovieEvent {
        match *self {
            MovieEvent::Birth => MovieEvent::Birth,
            MovieEvent::Death { edge } => MovieEvent::Death { edge: f(edge) },
            MovieEvent::Saddle { a, b } => MovieEvent::Saddle { a: f(a), b: f(b) },
            MovieEvent::R1Add { edge, sign, side } => MovieEvent::R1Add {
                edge: f(edge),
                sign,
                side,
            },
            MovieEvent::R1Remove { edge, sign } => MovieEvent::R1Remove {
                edge: f(edge),
                sign,
            },
            MovieEvent::R2Add {
                over,
                under,
                over_side,
                under_side,
                over_first,
            } => MovieEvent::R2Add {
                over: f(over),
                under: f(under),
                over_side,
                under_side,
                over_first,
            },
            MovieEvent::R2Remove { a, b } => MovieEvent::R2Remove { a: f(a), b: f(b) },
            MovieEvent::R3 { edges } => MovieEvent::R3 {
                edges: edges.map(f),
            },
        }
    }

    /// Contribution to the Euler characteristic of the cobordism.
    pub fn chi(&self) -> i64 {
        match self {
            MovieEvent::Birth | MovieEvent::Death { .. } => 1,
            MovieEvent::Saddle { .. } => -1,
            _ => 0,
        }
    }

    pub fn is_reidemeister(&self) -> bool {
        self.chi() == 0
    }
}
