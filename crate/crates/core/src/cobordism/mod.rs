//! Movies of link cobordisms and their induced chain maps.

mod chain_map;
mod event;

use rayon::prelude::*;

pub use event::MovieEvent;

use crate::complex::{
    apply_differential, block_basis, differential_of, enumerate_generators, relabel_chain,
    Bigrading, ChainVector, LabeledSmoothing, DEFAULT_BOUND,
};
use crate::diagram::{align, rewrite, Alignment, Diagram, Local, Rewrite, Side, Sign};
use crate::error::{Error, Result};
use crate::f2linalg::F2Matrix;

/// Image of a chain under a single event applied to `d`.
pub fn elementary_chain_map(d: &Diagram, e: &MovieEvent, c: &ChainVector) -> Result<ChainVector> {
    let rw = rewrite(d, e)?;
    Ok(chain_map::map_chain(d, &rw, c))
}

/// A cobordism presented as a sequence of events from a source diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Movie {
    pub source: Diagram,
    pub events: Vec<MovieEvent>,
}

/// The diagrams visited by a movie together with each step's rewrite data.
pub struct Replay {
    pub(crate) steps: Vec<Rewrite>,
    source: Diagram,
}

impl Replay {
    pub fn target(&self) -> &Diagram {
        self.steps.last().map_or(&self.source, |s| &s.diagram)
    }

    /// Diagram before step `k`; `k == len` gives the target.
    pub fn diagram(&self, k: usize) -> &Diagram {
        if k == 0 {
            &self.source
        } else {
            &self.steps[k - 1].diagram
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn correspondence(&self, k: usize) -> &crate::diagram::EdgeCorrespondence {
        &self.steps[k].corr
    }

    /// Crossing index after step `k` for each crossing before it.
    pub fn crossing_map(&self, k: usize) -> &[Option<usize>] {
        &self.steps[k].crossing_map
    }
}

impl Movie {
    pub fn new(source: Diagram, events: Vec<MovieEvent>) -> Self {
        Movie { source, events }
    }

    pub fn identity(d: Diagram) -> Self {
        Movie::new(d, Vec::new())
    }

    pub fn chi(&self) -> i64 {
        self.events.iter().map(MovieEvent::chi).sum()
    }

    pub fn replay(&self) -> Result<Replay> {
        let mut steps: Vec<Rewrite> = Vec::with_capacity(self.events.len());
        for (k, e) in self.events.iter().enumerate() {
            let cur = steps.last().map_or(&self.source, |s| &s.diagram);
            let rw = rewrite(cur, e).map_err(|err| match err {
                Error::InvalidSite { kind, reason } => Error::InvalidSite {
                    kind,
                    reason: format!("event {k}: {reason}"),
                },
                other => other,
            })?;
            steps.push(rw);
        }
        Ok(Replay {
            steps,
            source: self.source.clone(),
        })
    }

    pub fn target(&self) -> Result<Diagram> {
        Ok(self.replay()?.target().clone())
    }

    pub fn then(&self, other: &Movie) -> Result<Movie> {
        if self.target()? != other.source {
            return Err(Error::Format(
                "second movie does not start where the first ends".into(),
            ));
        }
        let mut events = self.events.clone();
        events.extend(other.events.iter().copied());
        Ok(Movie::new(self.source.clone(), events))
    }
}

pub fn apply_movie(m: &Movie, c: &ChainVector) -> Result<ChainVector> {
    let replay = m.replay()?;
    Ok(apply_replay(&replay, c))
}

pub(crate) fn apply_replay(replay: &Replay, c: &ChainVector) -> ChainVector {
    let mut cur = c.clone();
    for (k, step) in replay.steps.iter().enumerate() {
        cur = chain_map::map_chain(replay.diagram(k), step, &cur);
    }
    cur
}

/// The event undoing `rw`, expressed on the rewritten diagram.
fn inverse_event(before: &Diagram, ev: &MovieEvent, rw: &Rewrite) -> MovieEvent {
    match (&rw.local, ev) {
        (Local::Birth { edge }, _) => MovieEvent::Death { edge: *edge },
        (Local::Death, _) => MovieEvent::Birth,
        (Local::Saddle { new, .. }, _) => MovieEvent::Saddle {
            a: new[0],
            b: *new.get(1).unwrap_or(&new[0]),
        },
        (
            Local::R1Add {
                loop_edge, sign, ..
            },
            _,
        ) => MovieEvent::R1Remove {
            edge: *loop_edge,
            sign: *sign,
        },
        (
            Local::R1Remove {
                crossing,
                sign,
                new,
                ..
            },
            _,
        ) => {
            let e = before.crossing(*crossing).edges;
            let side = match sign {
                Sign::Pos if e[2] == e[3] => Side::Left,
                Sign::Pos => Side::Right,
                Sign::Neg if e[1] == e[2] => Side::Right,
                Sign::Neg => Side::Left,
            };
            MovieEvent::R1Add {
                edge: *new,
                sign: *sign,
                side,
            }
        }
        (Local::R2Add { bigon, .. }, _) => MovieEvent::R2Remove {
            a: bigon[0],
            b: bigon[1],
        },
        (Local::R2Remove { bigon, .. }, _) => {
            // The finger lived on the far side of each strand from the bigon.
            let [over, under] = *bigon;
            let face = before
                .faces()
                .into_iter()
                .find(|f| {
                    f.len() == 2 && f.iter().any(|x| x.0 == over) && f.iter().any(|x| x.0 == under)
                })
                .expect("validated bigon face");
            let side_of = |e| face.iter().find(|x| x.0 == e).unwrap().1;
            let new_over = rw.corr.image(over)[0];
            let new_under = rw.corr.image(under)[0];
            // When both strands merge into one edge, the over part came first
            // iff one short arc leads from it to the under part.
            let next = |e: crate::diagram::EdgeId| {
                let h = before.ends(e).expect("bigon edge").head;
                before.crossing(h.crossing).edges[(h.slot + 2) % 4]
            };
            MovieEvent::R2Add {
                over: new_over,
                under: new_under,
                over_side: Some(side_of(over).opposite()),
                under_side: Some(side_of(under).opposite()),
                over_first: new_over == new_under && next(next(over)) == under,
            }
        }
        (Local::R3 { after, .. }, _) => MovieEvent::R3 { edges: *after },
    }
}

/// The same cobordism read backwards: target becomes source and every event
/// is replaced by its inverse. Replaying it ends on a copy of the original
/// source whose ids may differ; see [`transfer`].
pub fn reverse_movie(m: &Movie) -> Result<Movie> {
    Ok(reverse_aligned(m)?.0)
}

/// The reversed movie plus an alignment of its target onto `m.source`.
pub fn reverse_aligned(m: &Movie) -> Result<(Movie, Alignment)> {
    let replay = m.replay()?;
    let mut cur = replay.target().clone();
    // Forward diagram k+1 to the reversed movie's current diagram.
    let mut phi = Alignment::identity(&cur);
    let mut events = Vec::with_capacity(m.events.len());
    for k in (0..replay.len()).rev() {
        let step = &replay.steps[k];
        let before = replay.diagram(k);
        let inv = inverse_event(before, &m.events[k], step).map_edges(|e| phi.edge(e));
        let rw = rewrite(&cur, &inv)?;
        let mut seed = std::collections::BTreeMap::new();
        for &e in before.edge_ids() {
            if step.corr.is_untouched(e) {
                let mid = phi.edge(e);
                if rw.corr.is_untouched(mid) {
                    seed.insert(e, mid);
                }
            }
        }
        phi = align(before, &rw.diagram, &seed)?;
        events.push(inv);
        cur = rw.diagram;
    }
    let back = inverse_alignment(&phi);
    Ok((Movie::new(replay.target().clone(), events), back))
}

fn inverse_alignment(a: &Alignment) -> Alignment {
    let mut crossings = vec![0; a.crossings.len()];
    for (i, &j) in a.crossings.iter().enumerate() {
        crossings[j] = i;
    }
    Alignment {
        edges: a.edges.iter().map(|(&x, &y)| (y, x)).collect(),
        crossings,
    }
}

/// The reversed cobordism prepared for repeated use: images land on the
/// original source diagram.
pub struct Transfer {
    replay: Replay,
    back: Alignment,
    source: Diagram,
}

impl Transfer {
    pub fn new(m: &Movie) -> Result<Self> {
        let (rev, back) = reverse_aligned(m)?;
        Ok(Transfer {
            replay: rev.replay()?,
            back,
            source: m.source.clone(),
        })
    }

    pub fn apply(&self, c: &ChainVector) -> Result<ChainVector> {
        let img = apply_replay(&self.replay, c);
        relabel_chain(self.replay.target(), &self.source, &self.back, &img)
    }
}

/// Image of a chain on the target of `m` under the reversed cobordism,
/// expressed on `m.source` itself.
pub fn transfer(m: &Movie, c: &ChainVector) -> Result<ChainVector> {
    Transfer::new(m)?.apply(c)
}

/// First generator at which a chain map fails to commute with `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMapWitness {
    pub generator: LabeledSmoothing,
    /// `d(phi(g)) + phi(d(g))`, nonzero.
    pub defect: ChainVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMapReport {
    pub checked: usize,
    pub witness: Option<ChainMapWitness>,
}

impl ChainMapReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks `d o phi = phi o d` on every generator of the source.
pub fn verify_chain_map(m: &Movie) -> Result<ChainMapReport> {
    verify_chain_map_with(m, DEFAULT_BOUND, |c| apply_movie(m, c))
}

/// As [`verify_chain_map`] with a custom map, for negative controls.
pub fn verify_chain_map_with<F>(m: &Movie, bound: usize, phi: F) -> Result<ChainMapReport>
where
    F: Fn(&ChainVector) -> Result<ChainVector> + Sync,
{
    if m.source.n_crossings() > bound {
        return Err(Error::Infeasible(format!(
            "{} crossings exceeds the bound of {bound}",
            m.source.n_crossings()
        )));
    }
    let target = m.target()?;
    let gens = enumerate_generators(&m.source, None);
    let results: Vec<Result<Option<ChainMapWitness>>> = gens
        .par_iter()
        .map(|g| {
            let single = ChainVector::single(g.clone());
            let mut defect = apply_differential(&target, &phi(&single)?)?;
            defect.add_chain(&phi(&differential_of(&m.source, g)?)?);
            Ok((!defect.is_zero()).then(|| ChainMapWitness {
                generator: g.clone(),
                defect,
            }))
        })
        .collect();
    let mut witness = None;
    for r in results {
        if let Some(w) = r? {
            witness = Some(w);
            break;
        }
    }
    Ok(ChainMapReport {
        checked: gens.len(),
        witness,
    })
}

/// Matrix of the induced map `Kh^{h,q}(source) -> Kh^{h,q+chi}(target)` in
/// the homology bases chosen by [`block_basis`].
pub fn induced_homology_map(m: &Movie, b: Bigrading) -> Result<F2Matrix> {
    induced_homology_map_with(m, b, DEFAULT_BOUND)
}

pub fn induced_homology_map_with(m: &Movie, b: Bigrading, bound: usize) -> Result<F2Matrix> {
    let replay = m.replay()?;
    let src = block_basis(&m.source, b, bound)?;
    let dst = block_basis(replay.target(), b.shift_q(m.chi()), bound)?;
    let mut out = F2Matrix::zeros(dst.dim(), src.dim());
    for k in 0..src.dim() {
        let img = apply_replay(&replay, &src.rep_chain(k));
        let class = dst.class_of(&img)?;
        for i in class.ones() {
            out.set(i, k, true);
        }
    }
    Ok(out)
}

/// Matrix of the transfer `Kh^{h,q}(target) -> Kh^{h,q+chi}(source)`
/// induced by reading `m` backwards.
pub fn induced_transfer_map(m: &Movie, b: Bigrading) -> Result<F2Matrix> {
    induced_transfer_map_with(m, b, DEFAULT_BOUND)
}

pub fn induced_transfer_map_with(m: &Movie, b: Bigrading, bound: usize) -> Result<F2Matrix> {
    let (rev, back) = reverse_aligned(m)?;
    let replay = rev.replay()?;
    let src = block_basis(&rev.source, b, bound)?;
    let dst = block_basis(&m.source, b.shift_q(m.chi()), bound)?;
    let mut out = F2Matrix::zeros(dst.dim(), src.dim());
    for k in 0..src.dim() {
        let img = apply_replay(&replay, &src.rep_chain(k));
        let img = relabel_chain(replay.target(), &m.source, &back, &img)?;
        for i in dst.class_of(&img)?.ones() {
            out.set(i, k, true);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::examples::*;

    fn u_labeled(x: bool) -> ChainVector {
        ChainVector::single(LabeledSmoothing::from_bits(&[], &[x as u8]))
    }

    #[test]
    fn birth_death_saddle_rows() {
        let empty = Diagram::empty();
        let unit = ChainVector::single(LabeledSmoothing::from_bits(&[], &[]));
        let born = elementary_chain_map(&empty, &MovieEvent::Birth, &unit).unwrap();
        assert_eq!(born, u_labeled(false));
        let u = Diagram::unknot();
        let dead =
            elementary_chain_map(&u, &MovieEvent::Death { edge: 0 }, &u_labeled(true)).unwrap();
        assert_eq!(dead, unit);
        let dead =
            elementary_chain_map(&u, &MovieEvent::Death { edge: 0 }, &u_labeled(false)).unwrap();
        assert!(dead.is_zero());
        let two = Diagram::new(vec![], vec![0, 1]).unwrap();
        let xx = ChainVector::single(LabeledSmoothing::from_bits(&[], &[1, 1]));
        let merged = elementary_chain_map(&two, &MovieEvent::Saddle { a: 0, b: 1 }, &xx).unwrap();
        assert!(merged.is_zero());
        let split = elementary_chain_map(&u, &MovieEvent::Saddle { a: 0, b: 0 }, &u_labeled(false))
            .unwrap();
        assert_eq!(split.len(), 2);
    }

    #[test]
    fn reverse_is_an_involution_and_keeps_chi() {
        let m = Movie::new(
            Diagram::empty(),
            vec![
                MovieEvent::Birth,
                MovieEvent::R1Add {
                    edge: 0,
                    sign: Sign::Pos,
                    side: Side::Left,
                },
                MovieEvent::Birth,
            ],
        );
        let r = reverse_movie(&m).unwrap();
        assert_eq!(r.chi(), m.chi());
        assert_eq!(r.events[0].kind(), "death");
        let rr = reverse_movie(&r).unwrap();
        assert_eq!(rr.target().unwrap(), m.target().unwrap());
        assert_eq!(rr.events.len(), m.events.len());
    }

    #[test]
    fn identity_movie_on_unknot() {
        let m = Movie::identity(Diagram::unknot());
        let t = induced_homology_map(&m, Bigrading::new(0, 1)).unwrap();
        assert_eq!(t, F2Matrix::identity(1));
    }

    #[test]
    fn birth_is_injective_on_the_empty_link() {
        let m = Movie::new(Diagram::empty(), vec![MovieEvent::Birth]);
        let t = induced_homology_map(&m, Bigrading::new(0, 0)).unwrap();
        assert_eq!((t.rows(), t.cols()), (1, 1));
        assert!(t.get(0, 0));
    }

    #[test]
    fn kinks_induce_isomorphisms() {
        for sign in [Sign::Pos, Sign::Neg] {
            for side in [Side::Left, Side::Right] {
                let m = Movie::new(
                    Diagram::unknot(),
                    vec![MovieEvent::R1Add {
                        edge: 0,
                        sign,
                        side,
                    }],
                );
                assert!(verify_chain_map(&m).unwrap().passed());
                for q in [-1, 1] {
                    let t = induced_homology_map(&m, Bigrading::new(0, q)).unwrap();
                    assert_eq!(t, F2Matrix::identity(1), "{sign:?} {side:?} q={q}");
                }
                let back = reverse_movie(&m).unwrap();
                assert!(verify_chain_map(&back).unwrap().passed());
            }
        }
    }

    #[test]
    fn edge_pushed_across_itself() {
        use crate::diagram::Side;
        let circle = Diagram::new(vec![], vec![0]).unwrap();
        let trefoil = left_trefoil();
        let e = trefoil.edge_ids()[0];
        for (d, e) in [(circle, 0), (trefoil, e)] {
            for over_first in [false, true] {
                for side in [Side::Left, Side::Right] {
                    let m = Movie::new(
                        d.clone(),
                        vec![MovieEvent::R2Add {
                            over: e,
                            under: e,
                            over_side: Some(side),
                            under_side: Some(side),
                            over_first,
                        }],
                    );
                    let t = m.target().unwrap();
                    assert_eq!(t.n_crossings(), d.n_crossings() + 2);
                    assert!(verify_chain_map(&m).unwrap().passed());
                    let back = reverse_movie(&m).unwrap();
                    assert_eq!(back.events.len(), 1);
                    let again = reverse_movie(&back).unwrap();
                    assert_eq!(again.target().unwrap().n_crossings(), t.n_crossings());
                    assert!(verify_chain_map(&again).unwrap().passed());
                }
            }
        }
    }

    #[test]
    fn hopf_r2_and_back() {
        let d = positive_hopf();
        let m = Movie::new(
            d.clone(),
            vec![MovieEvent::R2Add {
                over: 1,
                under: 3,
                over_side: None,
                under_side: None,
                over_first: false,
            }],
        );
        let rep = verify_chain_map(&m).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let back = reverse_movie(&m).unwrap();
        assert!(verify_chain_map(&back).unwrap().passed());
    }
}
