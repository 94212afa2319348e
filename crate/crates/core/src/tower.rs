//! Towers of links exhausting a properly embedded surface, their end and
//! co-end Khovanov homology, and finite-depth survival certificates.
//!
//! Stage `i` holds the slice `L_i`, the movie from `L_{i-1}` to `L_i` and the
//! quantum shift `chi_shift_i`. The co-end block at `(h, q)` is
//! `Kh^{h, q - chi_shift_i}(L_i)` and the end block is
//! `Kh^{h, q + chi_shift_i}(L_i)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cobordism::{induced_homology_map_with, induced_transfer_map_with, Movie, Transfer};
use crate::complex::{
    block_basis, is_boundary_with, is_cycle_local, BigradedDims, Bigrading, ChainVector,
    LabeledSmoothing, DEFAULT_BOUND,
};
use crate::diagram::{Diagram, EdgeId};
use crate::error::{Error, Result};
use crate::f2linalg::{eventual_rank, BitVec};
use crate::formats::{
    check_version, from_json, to_json, ChainDoc, DiagramDoc, EventDoc, MovieDoc, CERTIFICATE_V1,
    TOWER_V1,
};

pub const DEFAULT_DEPTH: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub diagram: Diagram,
    /// Movie from the previous stage; absent only at stage 0.
    pub movie: Option<Movie>,
    pub chi_shift: i64,
}

/// An edge named relative to a pattern application: a fixed id, the `j`-th
/// marker, or the `j`-th edge created by the pattern's `k`-th event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SiteRef {
    Edge(EdgeId),
    Marker(usize),
    Created { event: usize, index: usize },
}

impl fmt::Display for SiteRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteRef::Edge(e) => write!(f, "{e}"),
            SiteRef::Marker(j) => write!(f, "m{j}"),
            SiteRef::Created { event, index } => write!(f, "e{event}.{index}"),
        }
    }
}

impl std::str::FromStr for SiteRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("bad site reference {s:?}"));
        if let Some(j) = s.strip_prefix('m') {
            return j.parse().map(SiteRef::Marker).map_err(|_| bad());
        }
        if let Some(rest) = s.strip_prefix('e') {
            let (k, j) = rest.split_once('.').ok_or_else(bad)?;
            return Ok(SiteRef::Created {
                event: k.parse().map_err(|_| bad())?,
                index: j.parse().map_err(|_| bad())?,
            });
        }
        s.parse().map(SiteRef::Edge).map_err(|_| bad())
    }
}

impl Serialize for SiteRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SiteRef::Edge(e) => s.serialize_u64(*e as u64),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for SiteRef {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(SiteRef::Edge(n as EdgeId)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// How cycles extend from one generated stage to the next.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainTemplate {
    /// Resolution bits of the crossings the pattern adds, in their order in
    /// the new diagram.
    pub bits: Vec<u8>,
    /// Labels (0 for `1`, 1 for `x`) of circles through the named edges.
    /// Circles through edges the pattern leaves alone keep their old label.
    #[serde(default)]
    pub labels: Vec<(SiteRef, u8)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplicePattern {
    /// Marker edges in the last explicit stage.
    pub markers: Vec<EdgeId>,
    pub events: Vec<EventDoc<SiteRef>>,
    /// Where the markers sit after one application.
    pub next_markers: Vec<SiteRef>,
    pub chain: ChainTemplate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// The last stage repeats forever, connected to itself by `movie`.
    Repeat { movie: Movie },
    /// Each new stage is the last one with the same tangle spliced in.
    Splice(SplicePattern),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerSpec {
    pub stages: Vec<Stage>,
    pub pattern: Option<Pattern>,
    pub depth_default: usize,
}

/// A stage produced by a splice pattern, with what the next application
/// needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedStage {
    pub stage: Stage,
    pub markers: Vec<EdgeId>,
    /// The chain template resolved to concrete edges of this stage.
    pub bits: Vec<u8>,
    pub labels: Vec<(EdgeId, bool)>,
    /// Edges of the previous stage that no event touched.
    pub untouched: Vec<EdgeId>,
    /// Crossing of this stage for each crossing of the previous one.
    pub crossing_map: Vec<Option<usize>>,
}

impl TowerSpec {
    /// Checks that consecutive stages are joined by their movies and that
    /// the declared shifts follow the movies' Euler characteristics.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InconsistentTower(m));
        let Some(first) = self.stages.first() else {
            return bad("a tower needs at least one stage".into());
        };
        if first.movie.is_some() {
            return bad("stage 0 cannot have an incoming movie".into());
        }
        for i in 1..self.stages.len() {
            let (prev, cur) = (&self.stages[i - 1], &self.stages[i]);
            let Some(m) = &cur.movie else {
                return bad(format!("stage {i} has no movie"));
            };
            if m.source != prev.diagram {
                return bad(format!("movie {i} does not start at stage {}", i - 1));
            }
            if m.target()? != cur.diagram {
                return bad(format!("movie {i} does not end at stage {i}"));
            }
            if prev.chi_shift - cur.chi_shift != m.chi() {
                return bad(format!(
                    "chi_shift drops by {} across stage {i} but the movie has chi {}",
                    prev.chi_shift - cur.chi_shift,
                    m.chi()
                ));
            }
        }
        let last = &self.stages[self.stages.len() - 1].diagram;
        match &self.pattern {
            None => {}
            Some(Pattern::Repeat { movie }) => {
                if movie.source != *last || movie.target()? != *last {
                    return bad("a repeat movie must run from the last stage to itself".into());
                }
                if movie.chi() != 0 {
                    return bad(format!(
                        "a repeat movie must have chi 0, not {}",
                        movie.chi()
                    ));
                }
            }
            Some(Pattern::Splice(p)) => {
                if let Some(e) = p.markers.iter().find(|&&e| !last.has_edge(e)) {
                    return bad(format!("marker {e} is not an edge of the last stage"));
                }
            }
        }
        Ok(())
    }

    pub fn n_explicit(&self) -> usize {
        self.stages.len()
    }

    /// Stages `0..=n`, generating past the explicit prefix when a pattern
    /// allows it.
    pub fn stages_upto(&self, n: usize) -> Result<Vec<Stage>> {
        let mut out: Vec<Stage> = self.stages.iter().take(n + 1).cloned().collect();
        if out.len() == n + 1 {
            return Ok(out);
        }
        match &self.pattern {
            None => Err(Error::InconsistentTower(format!(
                "stage {n} requested but the tower has {} stages and no pattern",
                self.stages.len()
            ))),
            Some(Pattern::Repeat { movie }) => {
                let last = out.last().expect("validated").clone();
                while out.len() <= n {
                    out.push(Stage {
                        diagram: last.diagram.clone(),
                        movie: Some(movie.clone()),
                        chi_shift: last.chi_shift,
                    });
                }
                Ok(out)
            }
            Some(Pattern::Splice(_)) => {
                let gen = self.generate_upto(n)?;
                out.extend(gen.into_iter().map(|g| g.stage));
                Ok(out)
            }
        }
    }

    /// Applies a splice pattern repeatedly, returning stages past the
    /// explicit prefix up to `n`.
    pub fn generate_upto(&self, n: usize) -> Result<Vec<GeneratedStage>> {
        let Some(Pattern::Splice(p)) = &self.pattern else {
            return Err(Error::InconsistentTower("no splice pattern".into()));
        };
        let mut prev = self.stages.last().expect("validated").clone();
        let mut markers = p.markers.clone();
        let mut out = Vec::new();
        for _ in self.stages.len()..=n {
            let g = apply_pattern(p, &prev, &markers)?;
            markers = g.markers.clone();
            prev = g.stage.clone();
            out.push(g);
        }
        Ok(out)
    }

    /// Tower with stage `pos` duplicated and joined to its copy by the
    /// identity movie.
    pub fn insert_identity_stage(&self, pos: usize) -> Result<TowerSpec> {
        if pos >= self.stages.len() {
            return Err(Error::InconsistentTower(format!(
                "cannot duplicate stage {pos} of {}",
                self.stages.len()
            )));
        }
        let s = &self.stages[pos];
        let copy = Stage {
            diagram: s.diagram.clone(),
            movie: Some(Movie::identity(s.diagram.clone())),
            chi_shift: s.chi_shift,
        };
        let mut t = self.clone();
        t.stages.insert(pos + 1, copy);
        Ok(t)
    }

    /// The finite tower made of stages `0..=n`.
    pub fn truncate(&self, n: usize) -> Result<TowerSpec> {
        Ok(TowerSpec {
            stages: self.stages_upto(n)?,
            pattern: None,
            depth_default: self.depth_default,
        })
    }

    /// Last stage and the map whose stable image computes a limit.
    fn period(&self) -> Result<(Stage, Movie)> {
        let last = self.stages.last().expect("validated").clone();
        match &self.pattern {
            None => Ok((last.clone(), Movie::identity(last.diagram))),
            Some(Pattern::Repeat { movie }) => Ok((last, movie.clone())),
            Some(Pattern::Splice(_)) => Err(Error::NotPeriodic(
                "a splice pattern grows the diagram at every stage; verify a certificate instead"
                    .into(),
            )),
        }
    }
}

/// Dimension of the co-end Khovanov homology at `b`.
pub fn coend_dims(t: &TowerSpec, b: Bigrading, bound: usize) -> Result<usize> {
    t.validate()?;
    let (last, movie) = t.period()?;
    let block = Bigrading::new(b.h, b.q - last.chi_shift);
    if movie.events.is_empty() {
        return Ok(block_basis(&last.diagram, block, bound)?.dim());
    }
    eventual_rank(&induced_homology_map_with(&movie, block, bound)?)
}

/// Dimension of the end Khovanov homology at `b`.
pub fn end_dims(t: &TowerSpec, b: Bigrading, bound: usize) -> Result<usize> {
    t.validate()?;
    let (last, movie) = t.period()?;
    let block = Bigrading::new(b.h, b.q + last.chi_shift);
    if movie.events.is_empty() {
        return Ok(block_basis(&last.diagram, block, bound)?.dim());
    }
    eventual_rank(&induced_transfer_map_with(&movie, block, bound)?)
}

/// Both limits over a window of bigradings.
pub fn limit_table(
    t: &TowerSpec,
    hs: std::ops::RangeInclusive<i64>,
    qs: std::ops::RangeInclusive<i64>,
    bound: usize,
) -> Result<(BigradedDims, BigradedDims)> {
    let mut coend = BTreeMap::new();
    let mut end = BTreeMap::new();
    for h in hs {
        for q in qs.clone() {
            let b = Bigrading::new(h, q);
            coend.insert(b, coend_dims(t, b, bound)?);
            end.insert(b, end_dims(t, b, bound)?);
        }
    }
    Ok((BigradedDims(coend), BigradedDims(end)))
}

fn resolve_ref(
    r: SiteRef,
    markers: &[EdgeId],
    created: &[Vec<EdgeId>],
    d: &Diagram,
) -> Result<EdgeId> {
    let e = match r {
        SiteRef::Edge(e) => Some(e),
        SiteRef::Marker(j) => markers.get(j).copied(),
        SiteRef::Created { event, index } => created.get(event).and_then(|c| c.get(index)).copied(),
    };
    match e {
        Some(e) if d.has_edge(e) => Ok(e),
        _ => Err(Error::InconsistentTower(format!(
            "splice site mismatch: {r} does not name an edge here"
        ))),
    }
}

/// One application of a splice pattern to `prev`.
pub fn apply_pattern(
    p: &SplicePattern,
    prev: &Stage,
    markers: &[EdgeId],
) -> Result<GeneratedStage> {
    let mut cur = prev.diagram.clone();
    let mut created: Vec<Vec<EdgeId>> = Vec::with_capacity(p.events.len());
    let mut events = Vec::with_capacity(p.events.len());
    let mut untouched: Vec<EdgeId> = prev.diagram.edge_ids().to_vec();
    for ev in &p.events {
        let e = ev.resolve(|&r| resolve_ref(r, markers, &created, &cur))?;
        let (next, corr) = crate::diagram::apply_event(&cur, &e)?;
        untouched.retain(|&x| corr.is_untouched(x));
        created.push(corr.created.clone());
        events.push(e);
        cur = next;
    }
    let movie = Movie::new(prev.diagram.clone(), events);
    let replay = movie.replay()?;
    let mut crossing_map: Vec<Option<usize>> = (0..prev.diagram.n_crossings()).map(Some).collect();
    for k in 0..replay.len() {
        let step = replay.crossing_map(k);
        for c in crossing_map.iter_mut() {
            *c = c.and_then(|i| step[i]);
        }
    }
    let next_markers = p
        .next_markers
        .iter()
        .map(|&r| resolve_ref(r, markers, &created, &cur))
        .collect::<Result<Vec<_>>>()?;
    let labels = p
        .chain
        .labels
        .iter()
        .map(|&(r, l)| Ok((resolve_ref(r, markers, &created, &cur)?, l == 1)))
        .collect::<Result<Vec<_>>>()?;
    let chi_shift = prev.chi_shift - movie.chi();
    Ok(GeneratedStage {
        stage: Stage {
            diagram: cur,
            movie: Some(movie),
            chi_shift,
        },
        markers: next_markers,
        bits: p.chain.bits.clone(),
        labels,
        untouched,
        crossing_map,
    })
}

/// The next cycle from the previous one: old crossings keep their bits,
/// new crossings take the template bits, and each circle takes the label
/// of a named edge on it or of an untouched old edge on it.
pub fn extend_cycle(g: &GeneratedStage, prev: &Diagram, c: &ChainVector) -> Result<ChainVector> {
    let d = &g.stage.diagram;
    let n = d.n_crossings();
    let mut is_old = vec![false; n];
    for &j in g.crossing_map.iter().flatten() {
        is_old[j] = true;
    }
    let fresh: Vec<usize> = (0..n).filter(|&j| !is_old[j]).collect();
    if fresh.len() != g.bits.len() {
        return Err(Error::InconsistentTower(format!(
            "chain template has {} bits for {} new crossings",
            g.bits.len(),
            fresh.len()
        )));
    }
    let mut out = ChainVector::zero();
    for term in c.terms() {
        let mut s = BitVec::zeros(n);
        for (i, j) in g.crossing_map.iter().enumerate() {
            if let Some(j) = j {
                s.set(*j, term.smoothing.get(i));
            }
        }
        for (&j, &b) in fresh.iter().zip(&g.bits) {
            s.set(j, b == 1);
        }
        let old = prev.resolve(&term.smoothing)?;
        let new = d.resolve(&s)?;
        let mut label: Vec<Option<bool>> = vec![None; new.len()];
        let mut assign = |k: usize, v: bool, why: &dyn Fn() -> String| -> Result<()> {
            match label[k] {
                Some(w) if w != v => Err(Error::InconsistentTower(format!(
                    "chain template gives circle {k} two labels ({})",
                    why()
                ))),
                _ => {
                    label[k] = Some(v);
                    Ok(())
                }
            }
        };
        for &(e, v) in &g.labels {
            assign(new.circle_of(e), v, &|| format!("edge {e}"))?;
        }
        for &e in &g.untouched {
            let v = term.labels.get(old.circle_of(e));
            assign(new.circle_of(e), v, &|| format!("old edge {e}"))?;
        }
        let mut labels = BitVec::zeros(new.len());
        for (k, l) in label.into_iter().enumerate() {
            let v = l.ok_or_else(|| {
                Error::InconsistentTower(format!("chain template leaves circle {k} unlabeled"))
            })?;
            labels.set(k, v);
        }
        out.add(LabeledSmoothing::new(s, labels));
    }
    Ok(out)
}

// ------------------------------------------------------------ certificates

/// Cycles `c_1, c_2, ...` on stages `1, 2, ...`, with the end-homology
/// bigrading they are claimed to witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurvivalCertificate {
    pub cycles: Vec<ChainVector>,
    pub claimed: Bigrading,
}

#[derive(Clone, Copy, Debug)]
pub struct SurvivalOptions {
    pub depth: usize,
    /// Accept a transfer that is off by a boundary when the stage is small
    /// enough to decide it.
    pub homology_fallback: bool,
    pub bound: usize,
}

impl Default for SurvivalOptions {
    fn default() -> Self {
        SurvivalOptions {
            depth: DEFAULT_DEPTH,
            homology_fallback: false,
            bound: DEFAULT_BOUND,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub stage: usize,
    pub crossings: usize,
    pub terms: usize,
    /// Bigrading of `c_i`, absent for the zero chain.
    pub bigrading: Option<(i64, i64)>,
    pub expected_bigrading: (i64, i64),
    pub cycle: bool,
    /// `"chain"` when the transfer matched exactly, `"homology"` when it
    /// matched up to a boundary, absent at stage 1.
    pub transfer: Option<String>,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurvivalReport {
    pub claimed: (i64, i64),
    pub depth: usize,
    pub stages: Vec<StageReport>,
    pub passed: bool,
}

impl SurvivalReport {
    /// The end class the certificate witnesses, when every stage passed.
    pub fn end_class(&self) -> Option<Bigrading> {
        self.passed
            .then(|| Bigrading::new(self.claimed.0, self.claimed.1))
    }
}

fn first_failing_term(d: &Diagram, c: &ChainVector) -> Result<Option<LabeledSmoothing>> {
    for g in c.terms() {
        if !is_cycle_local(d, g)? {
            return Ok(Some(g.clone()));
        }
    }
    Ok(None)
}

/// Cycles for stages `1..=depth`: the certificate's own, then extensions
/// by the splice template.
pub fn certificate_cycles(
    t: &TowerSpec,
    cert: &SurvivalCertificate,
    depth: usize,
) -> Result<(Vec<Stage>, Vec<ChainVector>)> {
    if cert.cycles.is_empty() {
        return Err(Error::BadCertificate(
            "a certificate needs at least c_1".into(),
        ));
    }
    let stages = t.stages_upto(depth)?;
    let mut cycles: Vec<ChainVector> = cert.cycles.iter().take(depth).cloned().collect();
    if cycles.len() < depth {
        match &t.pattern {
            Some(Pattern::Repeat { .. }) | None => {
                // Repeats reuse the last diagram, so the last cycle carries over.
                let last = cycles.last().expect("nonempty").clone();
                if t.pattern.is_none() && depth >= t.stages.len() {
                    return Err(Error::BadCertificate(format!(
                        "depth {depth} exceeds the finite tower"
                    )));
                }
                if stages[cycles.len()].diagram != stages[depth].diagram {
                    return Err(Error::BadCertificate(
                        "not enough cycles for the requested depth".into(),
                    ));
                }
                cycles.resize(depth, last);
            }
            Some(Pattern::Splice(_)) => {
                let generated = t.generate_upto(depth)?;
                let first_gen = t.stages.len();
                while cycles.len() < depth {
                    let i = cycles.len() + 1;
                    if i < first_gen {
                        return Err(Error::BadCertificate(format!(
                            "stage {i} is explicit but has no cycle"
                        )));
                    }
                    let g = &generated[i - first_gen];
                    let next =
                        extend_cycle(g, &stages[i - 1].diagram, cycles.last().expect("nonempty"))?;
                    cycles.push(next);
                }
            }
        }
    }
    Ok((stages, cycles))
}

/// Checks that each `c_i` is a cycle, that reading stage `i` backwards
/// sends `c_i` to `c_{i-1}`, and that the gradings match the claim.
pub fn verify_survival(
    t: &TowerSpec,
    cert: &SurvivalCertificate,
    opts: &SurvivalOptions,
) -> Result<SurvivalReport> {
    t.validate()?;
    let (stages, cycles) = certificate_cycles(t, cert, opts.depth)?;
    let mut reports = Vec::with_capacity(opts.depth);
    for i in 1..=opts.depth {
        let d = &stages[i].diagram;
        let c = &cycles[i - 1];
        let expected = cert.claimed.shift_q(stages[i].chi_shift);
        let mut witness = None;
        let grading = match c.bigrading(d) {
            Ok(b) => b,
            Err(Error::NotHomogeneous(m)) => {
                witness = Some(format!("c_{i} is not homogeneous: {m}"));
                None
            }
            Err(e) => return Err(e),
        };
        if c.is_zero() {
            witness.get_or_insert_with(|| format!("c_{i} is zero"));
        } else if grading.is_some() && grading != Some(expected) {
            witness.get_or_insert_with(|| {
                format!(
                    "c_{i} sits at {} but the claim needs {expected}",
                    grading.unwrap()
                )
            });
        }
        let bad_term = first_failing_term(d, c)?;
        let cycle = bad_term.is_none();
        if let Some(g) = &bad_term {
            witness
                .get_or_insert_with(|| format!("term {g:?} of c_{i} fails the local cycle test"));
        }
        let mut transfer = None;
        if i >= 2 {
            let m = stages[i].movie.as_ref().expect("validated");
            let img = Transfer::new(m)?.apply(c)?;
            let want = &cycles[i - 2];
            if img == *want {
                transfer = Some("chain".to_string());
            } else {
                let mut diff = img.clone();
                diff.add_chain(want);
                let prev = &stages[i - 1].diagram;
                let by_boundary = opts.homology_fallback
                    && prev.n_crossings() <= opts.bound
                    && crate::complex::is_cycle(prev, &diff)?
                    && is_boundary_with(prev, &diff, opts.bound)?;
                if by_boundary {
                    transfer = Some("homology".to_string());
                } else {
                    let g = diff.terms().next().expect("nonzero difference").clone();
                    let side = if img.contains(&g) { "image" } else { "c_{i-1}" };
                    witness.get_or_insert_with(|| {
                        format!(
                            "transfer of c_{i} differs from c_{} at {g:?} (only in {side})",
                            i - 1
                        )
                    });
                }
            }
        }
        let passed = witness.is_none();
        reports.push(StageReport {
            stage: i,
            crossings: d.n_crossings(),
            terms: c.len(),
            bigrading: grading.map(|b| (b.h, b.q)),
            expected_bigrading: (expected.h, expected.q),
            cycle,
            transfer,
            passed,
            witness,
        });
    }
    let passed = reports.iter().all(|r| r.passed);
    Ok(SurvivalReport {
        claimed: (cert.claimed.h, cert.claimed.q),
        depth: opts.depth,
        stages: reports,
        passed,
    })
}

// ----------------------------------------------------------------- cap-off

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CapoffReport {
    pub passed: bool,
    /// `"all-zero"`, `"is_boundary"` or `"none"`.
    pub method: String,
    pub image_terms: usize,
    pub image_bigrading: Option<(i64, i64)>,
    pub reason: String,
}

/// Certifies `[c] != 0` by pushing `c` through `capoff`: an image made of
/// all-0 smoothings sits in the lowest homological degree that has chains,
/// so nothing bounds it. Otherwise falls back to a boundary test on `d`.
pub fn prove_nonzero_via_capoff(
    d: &Diagram,
    c: &ChainVector,
    capoff: &Movie,
    bound: usize,
) -> Result<CapoffReport> {
    if capoff.source != *d {
        return Err(Error::InconsistentTower(
            "cap-off movie does not start at the diagram".into(),
        ));
    }
    let target = capoff.target()?;
    let img = crate::cobordism::apply_movie(capoff, c)?;
    let image_bigrading = img.bigrading(&target)?.map(|b| (b.h, b.q));
    let all_zero = !img.is_zero() && img.terms().all(|g| g.smoothing.is_zero());
    if all_zero {
        return Ok(CapoffReport {
            passed: true,
            method: "all-zero".into(),
            image_terms: img.len(),
            image_bigrading,
            reason: "image is a nonzero sum of all-0 smoothings".into(),
        });
    }
    let why = if img.is_zero() {
        "image is zero"
    } else {
        "image has terms off the all-0 smoothing"
    };
    if c.is_zero() || d.n_crossings() > bound || !crate::complex::is_cycle(d, c)? {
        return Ok(CapoffReport {
            passed: false,
            method: "none".into(),
            image_terms: img.len(),
            image_bigrading,
            reason: why.into(),
        });
    }
    let boundary = is_boundary_with(d, c, bound)?;
    Ok(CapoffReport {
        passed: !boundary,
        method: "is_boundary".into(),
        image_terms: img.len(),
        image_bigrading,
        reason: format!(
            "{why}; the cycle {} a boundary",
            if boundary { "is" } else { "is not" }
        ),
    })
}

// ------------------------------------------------------------------- files

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StageDoc {
    diagram: DiagramDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    movie: Option<MovieDoc>,
    chi_shift: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum PatternDoc {
    Repeat {
        events: Vec<EventDoc<EdgeId>>,
    },
    Splice {
        markers: Vec<EdgeId>,
        events: Vec<EventDoc<SiteRef>>,
        next_markers: Vec<SiteRef>,
        chain: ChainTemplate,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerDoc {
    version: Option<String>,
    stages: Vec<StageDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pattern: Option<PatternDoc>,
    #[serde(default = "default_depth")]
    depth_default: usize,
}

fn default_depth() -> usize {
    DEFAULT_DEPTH
}

pub fn parse_tower(text: &str) -> Result<TowerSpec> {
    let doc: TowerDoc = from_json(text, TOWER_V1)?;
    let mut stages = Vec::with_capacity(doc.stages.len());
    for s in &doc.stages {
        stages.push(Stage {
            diagram: s.diagram.to_diagram()?,
            movie: s.movie.as_ref().map(MovieDoc::to_movie).transpose()?,
            chi_shift: s.chi_shift,
        });
    }
    let last = stages.last().map(|s| s.diagram.clone());
    let pattern = match doc.pattern {
        None => None,
        Some(PatternDoc::Repeat { events }) => {
            let source = last.ok_or_else(|| Error::InconsistentTower("no stages".into()))?;
            let events = events
                .iter()
                .map(|e| e.resolve(|&x| Ok(x)))
                .collect::<Result<Vec<_>>>()?;
            Some(Pattern::Repeat {
                movie: Movie::new(source, events),
            })
        }
        Some(PatternDoc::Splice {
            markers,
            events,
            next_markers,
            chain,
        }) => Some(Pattern::Splice(SplicePattern {
            markers,
            events,
            next_markers,
            chain,
        })),
    };
    let t = TowerSpec {
        stages,
        pattern,
        depth_default: doc.depth_default,
    };
    t.validate()?;
    Ok(t)
}

pub fn serialize_tower(t: &TowerSpec) -> String {
    let doc = TowerDoc {
        version: Some(TOWER_V1.into()),
        stages: t
            .stages
            .iter()
            .map(|s| StageDoc {
                diagram: DiagramDoc::from_diagram(&s.diagram),
                movie: s.movie.as_ref().map(MovieDoc::from_movie),
                chi_shift: s.chi_shift,
            })
            .collect(),
        pattern: t.pattern.as_ref().map(|p| match p {
            Pattern::Repeat { movie } => PatternDoc::Repeat {
                events: movie.events.iter().map(EventDoc::from_event).collect(),
            },
            Pattern::Splice(s) => PatternDoc::Splice {
                markers: s.markers.clone(),
                events: s.events.clone(),
                next_markers: s.next_markers.clone(),
                chain: s.chain.clone(),
            },
        }),
        depth_default: t.depth_default,
    };
    to_json(&doc)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDoc {
    version: Option<String>,
    cycles: Vec<ChainDoc>,
    claimed_bigrading: [i64; 2],
}

pub fn parse_certificate(text: &str) -> Result<SurvivalCertificate> {
    let doc: CertificateDoc = from_json(text, CERTIFICATE_V1)?;
    check_version(CERTIFICATE_V1, &doc.version)?;
    Ok(SurvivalCertificate {
        cycles: doc
            .cycles
            .iter()
            .map(ChainDoc::to_chain)
            .collect::<Result<Vec<_>>>()?,
        claimed: Bigrading::new(doc.claimed_bigrading[0], doc.claimed_bigrading[1]),
    })
}

pub fn serialize_certificate(c: &SurvivalCertificate) -> String {
    to_json(&CertificateDoc {
        version: Some(CERTIFICATE_V1.into()),
        cycles: c.cycles.iter().map(ChainDoc::from_chain).collect(),
        claimed_bigrading: [c.claimed.h, c.claimed.q],
    })
}
