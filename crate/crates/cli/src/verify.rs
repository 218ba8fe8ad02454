//! Randomized property suites. Every case draws from its own ChaCha stream of the given seed,
//! so results do not depend on thread scheduling. A failing line case is shrunk before its
//! reproduction spec is written.

use metric_center::filtration::{betti0_cells, betti1_planar, conjecture_scan, Filtration};
use metric_center::finite::{descriptors_bf, FiniteSpace, PointMetric};
use metric_center::grid::{largest_inscribed_balls, rasterize, Csg, GridShape};
use metric_center::line::{descriptors_line, topology_line, Bound, Interval, IntervalSet};
use metric_center::product::{product_center, product_oracle, Factor};
use metric_center::rational::{int, ratio, rational_from_f64, rational_to_f64, Rational};
use metric_center::union::{union_descriptors, UnionError, UnionSpace};
use metric_center::{ext_cmp, ext_max, report_consistency_check, AnySet, ExtReal, Mask};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::spec::{Named, SpaceSpec, SpecDocument, SubsetSpec, Task, TaskCommand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Exact line descriptors against a sampled lattice.
    Line,
    /// Product centers of two line sets against the sampled product.
    ProductLine,
    /// Union formulas and bounds against the union's own descriptors.
    UnionLine,
    /// Nesting and end points of line sublevel sets, and the center staying out of them.
    FiltrationLine,
    /// Inscribed-ball certificates on random planar regions.
    Inscribe,
    /// Planar Betti numbers against flood fill and the Euler characteristic.
    BettiPlanar,
    /// Every suite above.
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Line, Suite::ProductLine, Suite::UnionLine, Suite::FiltrationLine, Suite::Inscribe, Suite::BettiPlanar];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Line => "line",
            Suite::ProductLine => "product-line",
            Suite::UnionLine => "union-line",
            Suite::FiltrationLine => "filtration-line",
            Suite::Inscribe => "inscribe",
            Suite::BettiPlanar => "betti-planar",
            Suite::All => "all",
        }
    }

    /// Default sampling resolution of the suites that sample. Generated line depths differ by
    /// multiples of 1/8, and the sampled center's band must stay well inside that gap.
    pub fn default_h(self) -> Option<f64> {
        match self {
            Suite::ProductLine => Some(0.02),
            Suite::Inscribe => Some(0.02),
            _ => None,
        }
    }
}

/// The generator for case `case` of a run seeded with `seed`.
pub fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
enum Verdict {
    Pass(String),
    /// The case is outside the suite's domain; shrinking treats it as passing.
    Skip,
    Fail(String),
}

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub case: usize,
    pub passed: bool,
    pub detail: String,
    /// Self-contained spec reproducing a failure.
    pub repro: Option<SpecDocument>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub h: Option<f64>,
    pub results: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| !r.passed).count()
    }
}

/// Runs `cases` cases in parallel; results come back in case order.
pub fn run_suite(suite: Suite, cases: usize, seed: u64, h: Option<f64>) -> SuiteReport {
    assert!(suite != Suite::All, "run each suite on its own");
    let h = h.or(suite.default_h());
    let results = (0..cases).into_par_iter().map(|k| run_case(suite, k, &mut case_rng(seed, k), h, seed)).collect();
    SuiteReport { suite, seed, h, results }
}

fn run_case(suite: Suite, case: usize, rng: &mut ChaCha8Rng, h: Option<f64>, seed: u64) -> CaseResult {
    let label = |msg: &str| format!("{} case {case} (seed {seed}): {msg}", suite.name());
    let mut line_suite = |gen: &dyn Fn(&mut ChaCha8Rng) -> LineCase, check: &dyn Fn(&LineCase) -> Verdict| {
        let (c, verdict) = draw(rng, gen, check);
        match verdict {
            Verdict::Fail(msg) => {
                let small = minimize(&c, |x| matches!(check(x), Verdict::Fail(_)));
                let msg2 = match check(&small) {
                    Verdict::Fail(m) => m,
                    _ => msg.clone(),
                };
                let doc = small.repro(suite, h, &label(&msg2));
                CaseResult { case, passed: false, detail: msg, repro: Some(doc) }
            }
            Verdict::Pass(detail) => CaseResult { case, passed: true, detail, repro: None },
            Verdict::Skip => CaseResult { case, passed: true, detail: "no usable case drawn".into(), repro: None },
        }
    };
    match suite {
        Suite::Line => line_suite(&|r| LineCase::single(separated_pieces(r)), &check_line),
        Suite::ProductLine => {
            let step = h.expect("default h");
            line_suite(&|r| LineCase { parts: vec![separated_pieces(r), separated_pieces(r)], ambient: Ambient::Line }, &|c| {
                check_product(c, step)
            })
        }
        Suite::UnionLine => line_suite(&|r| separated_parts(r, 2, true), &check_union),
        Suite::FiltrationLine => line_suite(&filtration_case, &check_filtration),
        Suite::Inscribe => {
            let h = h.expect("default h");
            let shape = random_region(rng);
            match check_inscribe(&shape, h) {
                Verdict::Fail(msg) => {
                    let doc = grid_repro(shape, h, TaskCommand::Inscribe, &label(&msg));
                    CaseResult { case, passed: false, detail: msg, repro: Some(doc) }
                }
                Verdict::Pass(d) => CaseResult { case, passed: true, detail: d, repro: None },
                Verdict::Skip => CaseResult { case, passed: true, detail: "empty region".into(), repro: None },
            }
        }
        Suite::BettiPlanar => {
            let (rows, cols) = (rng.gen_range(1..=64), rng.gen_range(1..=64));
            let m = random_planar_mask(rng, rows, cols);
            match check_betti(rows, cols, &m) {
                Verdict::Fail(msg) => {
                    let doc = mask_repro(rows, cols, &m, &label(&msg));
                    CaseResult { case, passed: false, detail: msg, repro: Some(doc) }
                }
                Verdict::Pass(d) => CaseResult { case, passed: true, detail: d, repro: None },
                Verdict::Skip => unreachable!("every mask is usable"),
            }
        }
        Suite::All => unreachable!(),
    }
}

/// Draws until the check accepts the case, or gives up after many tries.
fn draw(rng: &mut ChaCha8Rng, gen: &dyn Fn(&mut ChaCha8Rng) -> LineCase, check: &dyn Fn(&LineCase) -> Verdict) -> (LineCase, Verdict) {
    let mut last = None;
    for _ in 0..1000 {
        let c = gen(rng);
        let v = check(&c);
        if v != Verdict::Skip {
            return (c, v);
        }
        last = Some(c);
    }
    (last.expect("at least one draw"), Verdict::Skip)
}

// ---------------------------------------------------------------------------------------
// Line cases

/// Lattice step of generated endpoints.
const DEN: i64 = 4;

fn q(n: i64) -> Rational {
    ratio(n, DEN)
}

/// A piece with endpoints in units of `1/DEN`; `None` is an infinite end.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: Option<i64>,
    pub lo_closed: bool,
    pub hi: Option<i64>,
    pub hi_closed: bool,
}

impl Piece {
    pub fn closed(lo: i64, hi: i64) -> Piece {
        Piece { lo: Some(lo), lo_closed: true, hi: Some(hi), hi_closed: true }
    }

    fn interval(&self) -> Option<Interval> {
        if let (Some(a), Some(b)) = (self.lo, self.hi) {
            if a > b || (a == b && !(self.lo_closed && self.hi_closed)) {
                return None;
            }
        }
        let lo = self.lo.map_or(Bound::NegInf, |a| Bound::Finite(q(a)));
        let hi = self.hi.map_or(Bound::PosInf, |b| Bound::Finite(q(b)));
        Some(Interval::new(lo, self.lo_closed && self.lo.is_some(), hi, self.hi_closed && self.hi.is_some()))
    }
}

fn build(pieces: &[Piece]) -> Option<IntervalSet> {
    let raw: Option<Vec<Interval>> = pieces.iter().map(Piece::interval).collect();
    IntervalSet::normalize(raw?).ok()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ambient {
    Line,
    /// The line minus these lattice points (those outside every part).
    Punctured(Vec<i64>),
    /// The parts plus these pieces.
    Plus(Vec<Piece>),
}

/// Parts and an ambient subspace of the line, all on the `1/DEN` lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LineCase {
    pub parts: Vec<Vec<Piece>>,
    pub ambient: Ambient,
}

impl LineCase {
    fn single(pieces: Vec<Piece>) -> LineCase {
        LineCase { parts: vec![pieces], ambient: Ambient::Line }
    }

    /// The parts and the ambient, or `None` when a piece is malformed.
    pub fn sets(&self) -> Option<(Vec<IntervalSet>, IntervalSet)> {
        let parts: Option<Vec<IntervalSet>> = self.parts.iter().map(|p| build(p)).collect();
        let parts = parts?;
        if parts.iter().any(IntervalSet::is_empty) {
            return None;
        }
        let all = parts.iter().fold(IntervalSet::empty(), |acc, p| acc.union(p));
        let y = match &self.ambient {
            Ambient::Line => IntervalSet::real_line(),
            Ambient::Punctured(p) => {
                IntervalSet::real_line().difference(&IntervalSet::points(p.iter().map(|&k| q(k))).difference(&all))
            }
            Ambient::Plus(extra) => all.union(&build(extra)?),
        };
        Some((parts, y))
    }

    /// Same case with one piece (or one ambient feature) removed.
    fn fewer_pieces(&self) -> Vec<LineCase> {
        let mut out = Vec::new();
        for (k, part) in self.parts.iter().enumerate() {
            if part.len() > 1 {
                for i in 0..part.len() {
                    let mut c = self.clone();
                    c.parts[k].remove(i);
                    out.push(c);
                }
            }
        }
        match &self.ambient {
            Ambient::Punctured(p) => {
                for i in 0..p.len() {
                    let mut p = p.clone();
                    p.remove(i);
                    out.push(LineCase { parts: self.parts.clone(), ambient: Ambient::Punctured(p) });
                }
                out.push(LineCase { parts: self.parts.clone(), ambient: Ambient::Line });
            }
            Ambient::Plus(extra) => {
                for i in 0..extra.len() {
                    let mut e = extra.clone();
                    e.remove(i);
                    out.push(LineCase { parts: self.parts.clone(), ambient: Ambient::Plus(e) });
                }
            }
            Ambient::Line => {}
        }
        out
    }

    fn map_coords(&self, f: &dyn Fn(i64) -> i64) -> LineCase {
        let piece = |p: &Piece| Piece { lo: p.lo.map(f), hi: p.hi.map(f), ..p.clone() };
        LineCase {
            parts: self.parts.iter().map(|part| part.iter().map(piece).collect()).collect(),
            ambient: match &self.ambient {
                Ambient::Line => Ambient::Line,
                Ambient::Punctured(p) => Ambient::Punctured(p.iter().map(|&k| f(k)).collect()),
                Ambient::Plus(e) => Ambient::Plus(e.iter().map(piece).collect()),
            },
        }
    }

    fn magnitude(&self) -> i64 {
        let mut total = 0;
        let mut add = |p: &Piece| total += p.lo.map_or(0, i64::abs) + p.hi.map_or(0, i64::abs);
        self.parts.iter().flatten().for_each(&mut add);
        match &self.ambient {
            Ambient::Line => {}
            Ambient::Punctured(p) => total += p.iter().map(|k| k.abs()).sum::<i64>(),
            Ambient::Plus(e) => e.iter().for_each(add),
        }
        total
    }

    /// Candidates with smaller endpoint magnitudes: everything halved, everything shifted one
    /// step toward zero, or a single endpoint moved one step toward zero.
    fn smaller(&self) -> Vec<LineCase> {
        let toward = |k: i64| k - k.signum();
        let mut out = vec![self.map_coords(&|k| k / 2), self.map_coords(&|k| k - self.shift_sign())];
        for (k, part) in self.parts.iter().enumerate() {
            for (i, p) in part.iter().enumerate() {
                for end in [0, 1] {
                    let mut c = self.clone();
                    let e = if end == 0 { &mut c.parts[k][i].lo } else { &mut c.parts[k][i].hi };
                    if let Some(v) = e {
                        if *v != 0 {
                            *v = toward(*v);
                            out.push(c);
                        }
                    }
                    let _ = p;
                }
            }
        }
        let m = self.magnitude();
        out.retain(|c| c.magnitude() < m);
        out
    }

    /// Direction that moves the finite endpoints toward zero as a block.
    fn shift_sign(&self) -> i64 {
        let ends: Vec<i64> = self.parts.iter().flatten().flat_map(|p| [p.lo, p.hi]).flatten().collect();
        if ends.iter().all(|&k| k > 0) {
            1
        } else if ends.iter().all(|&k| k < 0) {
            -1
        } else {
            0
        }
    }

    fn repro(&self, suite: Suite, h: Option<f64>, description: &str) -> SpecDocument {
        let (parts, y) = self.sets().expect("a failing case builds");
        let names: Vec<String> = (0..parts.len()).map(|k| ((b'A' + k as u8) as char).to_string()).collect();
        let subsets = names
            .iter()
            .zip(&parts)
            .map(|(n, p)| (n.clone(), SubsetSpec { space: "Y".into(), set: Some(p.clone()), points: None, shape: None }))
            .collect();
        let (command, h) = match suite {
            Suite::ProductLine => (TaskCommand::Product, h),
            Suite::UnionLine => (TaskCommand::Union, None),
            Suite::FiltrationLine => (TaskCommand::Filtrate, None),
            _ => (TaskCommand::Analyze, None),
        };
        SpecDocument {
            description: Some(description.to_string()),
            spaces: Named(vec![("Y".into(), SpaceSpec::IntervalSet { set: y })]),
            subsets: Named(subsets),
            tasks: vec![Task { command, subsets: names, h }],
        }
    }
}

/// Shrinks piece counts first, then endpoint magnitudes, keeping `fails` true throughout.
pub fn minimize(case: &LineCase, fails: impl Fn(&LineCase) -> bool) -> LineCase {
    let mut cur = case.clone();
    'outer: loop {
        for c in cur.fewer_pieces() {
            if fails(&c) {
                cur = c;
                continue 'outer;
            }
        }
        for c in cur.smaller() {
            if fails(&c) {
                cur = c;
                continue 'outer;
            }
        }
        return cur;
    }
}

fn random_piece(rng: &mut ChaCha8Rng, range: i64, max_len: i64) -> Piece {
    let lo = rng.gen_range(-range..range);
    let len = rng.gen_range(0..=max_len);
    let (lc, hc) = if len == 0 { (true, true) } else { (rng.gen_bool(0.5), rng.gen_bool(0.5)) };
    Piece { lo: Some(lo), lo_closed: lc, hi: Some(lo + len), hi_closed: hc }
}

/// One to three pieces in `[0, 4]`, each and every gap at least one step long.
fn separated_pieces(rng: &mut ChaCha8Rng) -> Vec<Piece> {
    let mut at = rng.gen_range(0..3i64);
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let len = rng.gen_range(1..=5i64);
        out.push(Piece { lo: Some(at), lo_closed: rng.gen_bool(0.5), hi: Some(at + len), hi_closed: rng.gen_bool(0.5) });
        at += len + rng.gen_range(1..=3i64);
    }
    out
}

/// `n` parts laid out left to right with gaps, the end pieces possibly unbounded, in the line,
/// the punctured line, or the parts plus extra pieces.
fn separated_parts(rng: &mut ChaCha8Rng, n: usize, unbounded: bool) -> LineCase {
    loop {
        let count = rng.gen_range(n..=n + 4);
        let raw: Vec<(i64, i64, usize, bool, bool)> = (0..count)
            .map(|_| (rng.gen_range(0..=8), rng.gen_range(1..=6), rng.gen_range(0..n), rng.gen_bool(0.5), rng.gen_bool(0.5)))
            .collect();
        let (neg, pos) = (unbounded && rng.gen_bool(0.5), unbounded && rng.gen_bool(0.5));
        let kind = rng.gen_range(0..3);
        let extra: Vec<Piece> = (0..rng.gen_range(1..=4)).map(|_| random_piece(rng, 40, 16)).collect();
        let punct: Vec<i64> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(-30..50)).collect();
        if !(0..n).all(|k| raw.iter().any(|x| x.2 == k)) {
            continue;
        }
        let mut parts = vec![Vec::new(); n];
        let mut at = -20i64;
        for (i, &(len, gap, owner, lc, hc)) in raw.iter().enumerate() {
            let (lc, hc) = if len == 0 { (true, true) } else { (lc, hc) };
            let lo = if i == 0 && neg { None } else { Some(at) };
            let hi = if i == count - 1 && pos { None } else { Some(at + len) };
            parts[owner].push(Piece { lo, lo_closed: lc && lo.is_some(), hi, hi_closed: hc && hi.is_some() });
            at += len + gap;
        }
        let ambient = match kind {
            0 => Ambient::Line,
            1 => Ambient::Punctured(punct),
            _ => Ambient::Plus(extra),
        };
        return LineCase { parts, ambient };
    }
}

/// Any lattice set, sometimes with a ray, in the line, the punctured line, or a larger union.
fn filtration_case(rng: &mut ChaCha8Rng) -> LineCase {
    let mut pieces: Vec<Piece> = (0..rng.gen_range(1..=4)).map(|_| random_piece(rng, 40, 16)).collect();
    let at = rng.gen_range(-40..40);
    match rng.gen_range(0..6) {
        0 => pieces.push(Piece { lo: Some(at), lo_closed: true, hi: None, hi_closed: false }),
        1 => pieces.push(Piece { lo: None, lo_closed: false, hi: Some(at), hi_closed: false }),
        _ => {}
    }
    let ambient = match rng.gen_range(0..3) {
        0 => Ambient::Line,
        1 => Ambient::Punctured((0..rng.gen_range(0..4)).map(|_| rng.gen_range(-44..44)).collect()),
        _ => Ambient::Plus((0..rng.gen_range(1..=4)).map(|_| random_piece(rng, 40, 16)).collect()),
    };
    LineCase { parts: vec![pieces], ambient }
}

/// Bounded, with every piece and every gap at least one lattice step long.
fn well_separated(s: &IntervalSet) -> bool {
    let step = q(1);
    let pieces = s.pieces();
    let finite = |b: &Bound| b.finite().cloned();
    let mut prev_hi: Option<Rational> = None;
    for p in pieces {
        let (Some(lo), Some(hi)) = (finite(p.lo()), finite(p.hi())) else { return false };
        if &hi - &lo < step || prev_hi.as_ref().is_some_and(|h| &lo - h < step) {
            return false;
        }
        prev_hi = Some(hi);
    }
    !pieces.is_empty()
}

fn le(a: &ExtReal, b: &ExtReal) -> bool {
    ext_cmp(a, b).is_ok_and(|o| o.is_le())
}

fn gt(a: &ExtReal, b: &ExtReal) -> bool {
    ext_cmp(a, b).is_ok_and(|o| o.is_gt())
}

/// Finite point set of a bounded line center, as floats.
fn center_points(s: &IntervalSet) -> Vec<f64> {
    s.components().iter().flat_map(|c| c.finite_endpoints()).map(|v| rational_to_f64(&v)).collect()
}

fn check_line(c: &LineCase) -> Verdict {
    let Some((parts, y)) = c.sets() else { return Verdict::Skip };
    let a = &parts[0];
    if !well_separated(a) || y != IntervalSet::real_line() {
        return Verdict::Skip;
    }
    let r = match descriptors_line(a, &y) {
        Ok(r) => r,
        Err(e) => return Verdict::Fail(format!("A = {a}: {e}")),
    };
    let v = report_consistency_check(&r);
    if !v.is_empty() {
        let v: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Verdict::Fail(format!("A = {a}: {}", v.join("; ")));
    }
    // The same set on the lattice k/40, two units of room on each side.
    let s = 1.0 / 40.0;
    let lo = (rational_to_f64(a.finite_endpoints().first().unwrap()) * 40.0).floor() as i64 - 80;
    let hi = (rational_to_f64(a.finite_endpoints().last().unwrap()) * 40.0).ceil() as i64 + 80;
    let rows: Vec<Vec<f64>> = (lo..=hi).map(|k| vec![k as f64 * s]).collect();
    let x = FiniteSpace::from_points(&rows, PointMetric::Euclidean, s).expect("a lattice is a metric space");
    let mask = Mask::from_bits((lo..=hi).map(|k| a.contains(&ratio(k, 40))).collect());
    let sampled = descriptors_bf(&x, &mask);
    let (want, got) = (r.radius.to_f64(), sampled.radius.to_f64());
    if (want - got).abs() > 2.0 * s {
        return Verdict::Fail(format!("A = {a}: exact radius {want}, sampled {got}"));
    }
    let exact_pts = center_points(&r.center);
    let pts: Vec<f64> = sampled.center.ones().map(|i| rows[i][0]).collect();
    let gap = |p: f64, set: &[f64]| set.iter().map(|q| (p - q).abs()).fold(f64::INFINITY, f64::min);
    let hd = pts.iter().map(|&p| gap(p, &exact_pts)).chain(exact_pts.iter().map(|&p| gap(p, &pts))).fold(0.0, f64::max);
    if hd > 2.0 * s + 1e-9 {
        return Verdict::Fail(format!("A = {a}: sampled center {hd} from the exact one"));
    }
    Verdict::Pass(format!("A = {a}: radius {}", r.radius))
}

/// Samples of a bounded set: each piece at `step` including its ends.
fn sample_set(s: &IntervalSet, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for c in s.components() {
        let ends = c.finite_endpoints();
        let (lo, hi) = (rational_to_f64(ends.first().unwrap()), rational_to_f64(ends.last().unwrap()));
        let n = ((hi - lo) / step).ceil() as usize;
        out.extend((0..=n).map(|k| (lo + k as f64 * step).min(hi)));
    }
    out
}

/// Max-metric Hausdorff distance between a product of line sets and a finite point set.
pub(crate) fn hausdorff_to_product(sets: &[IntervalSet], points: &[Vec<f64>], step: f64) -> f64 {
    if sets.iter().any(IntervalSet::is_empty) || points.is_empty() {
        return if sets.iter().any(IntervalSet::is_empty) && points.is_empty() { 0.0 } else { f64::INFINITY };
    }
    let to_set = |x: f64, s: &IntervalSet| {
        let v = rational_from_f64(x).expect("finite coordinate");
        rational_to_f64(&s.closure().distance_to(&v).expect("nonempty set"))
    };
    let forward =
        points.iter().map(|p| p.iter().zip(sets).map(|(&x, s)| to_set(x, s)).fold(0.0, f64::max)).fold(0.0, f64::max);
    let samples: Vec<Vec<f64>> = sets.iter().map(|s| sample_set(s, step)).collect();
    let mut idx = vec![0usize; sets.len()];
    let mut backward: f64 = 0.0;
    'outer: loop {
        let x: Vec<f64> = idx.iter().zip(&samples).map(|(&i, s)| s[i]).collect();
        let near = points
            .iter()
            .map(|p| p.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        backward = backward.max(near);
        for k in 0..idx.len() {
            idx[k] += 1;
            if idx[k] < samples[k].len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    forward.max(backward)
}

fn check_product(c: &LineCase, h: f64) -> Verdict {
    let Some((parts, y)) = c.sets() else { return Verdict::Skip };
    if parts.len() != 2 || !parts.iter().all(well_separated) || y != IntervalSet::real_line() {
        return Verdict::Skip;
    }
    let tag = format!("A = {}, B = {}", parts[0], parts[1]);
    let factors = [Factor::line(parts[0].clone(), y.clone()), Factor::line(parts[1].clone(), y)];
    let p = match product_center(&factors[0], &factors[1]) {
        Ok(p) => p,
        Err(e) => return Verdict::Fail(format!("{tag}: {e}")),
    };
    let o = match product_oracle(&factors, h) {
        Ok(o) => o,
        Err(e) => return Verdict::Fail(format!("{tag}: oracle: {e}")),
    };
    let rd = (o.report.radius.to_f64() - p.radius.to_f64()).abs();
    let centers: Vec<IntervalSet> = p.center.iter().map(|s| s.as_line().expect("line factors").clone()).collect();
    let pts: Vec<Vec<f64>> = o.report.center.ones().map(|i| o.space.coords(i).expect("sampled lines").to_vec()).collect();
    let hd = hausdorff_to_product(&centers, &pts, h / 2.0);
    if rd > 4.0 * h || hd > 4.0 * h {
        return Verdict::Fail(format!("{tag}: center {p}, radius {}; oracle off by {rd} (radius) and {hd} (center)", p.radius));
    }
    Verdict::Pass(format!("{tag}: {} ({})", p, p.case.as_str()))
}

fn check_union(c: &LineCase) -> Verdict {
    let Some((parts, y)) = c.sets() else { return Verdict::Skip };
    if parts.len() != 2 {
        return Verdict::Skip;
    }
    let space = UnionSpace::Line(y.clone());
    let (a, b) = (AnySet::Line(parts[0].clone()), AnySet::Line(parts[1].clone()));
    let u = match union_descriptors(&space, &a, &b) {
        Ok(u) => u,
        Err(UnionError::Clopen { .. } | UnionError::NotSeparated { .. }) => return Verdict::Skip,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let tag = format!("A = {}, B = {} in {y}", parts[0], parts[1]);
    let srad = &u.direct.semi_radius;
    if !u.semi_radius.contains(srad) {
        return Verdict::Fail(format!("{tag}: semi-radius {srad} outside {} ({})", u.semi_radius, u.case));
    }
    if u.case.determined() {
        if u.center.as_ref() != Some(&u.direct.center) || u.radius.as_ref() != Some(&u.direct.radius) {
            return Verdict::Fail(format!("{tag}: {} gives a center other than the union's own {}", u.case, u.direct.center));
        }
    } else if u.center.is_some() || u.radius.is_some() {
        return Verdict::Fail(format!("{tag}: {} should leave the center undetermined", u.case));
    }
    let (ra, rb) = (&u.parts[0].report.radius, &u.parts[1].report.radius);
    if gt(srad, &ext_max(ra, rb).expect("one regime")) {
        return Verdict::Fail(format!("{tag}: semi-radius {srad} above both radii"));
    }
    for (i, part) in u.parts.iter().enumerate() {
        let other = &u.parts[1 - i].report.radius;
        let above = !part.double_tilde.as_ref().expect("two parts").is_empty();
        if above != gt(srad, other) {
            return Verdict::Fail(format!("{tag}: double-tilde set of part {i} disagrees with semi-radius {srad} vs {other}"));
        }
    }
    if space.path_metric() && u.parts.iter().any(|p| !p.tilde.is_empty()) {
        return Verdict::Fail(format!("{tag}: nonempty tilde set in a path metric space"));
    }
    Verdict::Pass(format!("{tag}: {}", u.case))
}

fn check_filtration(c: &LineCase) -> Verdict {
    let Some((parts, y)) = c.sets() else { return Verdict::Skip };
    let a = &parts[0];
    let (Ok(f), Ok(r), Ok(topo)) = (Filtration::line(a, &y), descriptors_line(a, &y), topology_line(a, &y)) else {
        return Verdict::Skip;
    };
    if r.clopen {
        return Verdict::Skip;
    }
    let tag = format!("A = {a} in {y}");
    let line = |al: &ExtReal| f.sublevel(al).ok().and_then(|s| s.as_line().cloned());
    let mut alphas: Vec<ExtReal> = f.thresholds().to_vec();
    alphas.extend(f.thresholds().windows(2).map(|w| {
        let (s, t) = (w[0].as_exact().expect("exact"), w[1].as_exact().expect("exact"));
        ExtReal::exact((s + t) / int(2)).expect("nonnegative")
    }));
    alphas.sort_by(|s, t| ext_cmp(s, t).expect("one regime"));
    let sets: Option<Vec<IntervalSet>> = alphas.iter().map(line).collect();
    let Some(sets) = sets else { return Verdict::Fail(format!("{tag}: a sublevel set failed")) };
    if let Some(k) = sets.windows(2).position(|w| !w[0].is_subset_of(&w[1])) {
        return Verdict::Fail(format!("{tag}: P at {} is not inside P at {}", alphas[k], alphas[k + 1]));
    }
    if r.semi_radius.is_finite() && line(&r.semi_radius).as_ref() != Some(a) {
        return Verdict::Fail(format!("{tag}: P at the semi-radius {} is not A", r.semi_radius));
    }
    let p0 = topo.boundary.intersection(a);
    if line(&ExtReal::zero_exact()).as_ref() != Some(&p0) {
        return Verdict::Fail(format!("{tag}: P_0 is not the boundary points of A ({p0})"));
    }
    if let Ok(scan) = conjecture_scan(&f, None) {
        if !scan.center_excluded {
            return Verdict::Fail(format!("{tag}: a sublevel set below the radius meets the center"));
        }
        for row in &scan.rows {
            let n = line(&row.alpha).map(|p| p.components().len());
            if n != Some(row.betti0) {
                return Verdict::Fail(format!("{tag}: β₀ at {} is {}, the set has {n:?} components", row.alpha, row.betti0));
            }
        }
    }
    let _ = le;
    Verdict::Pass(format!("{tag}: {} thresholds", f.thresholds().len()))
}

// ---------------------------------------------------------------------------------------
// Grid cases

/// Up to three discs or boxes, minus up to two small discs, on a 1/20 lattice of parameters.
pub fn random_region(rng: &mut ChaCha8Rng) -> Csg {
    let mut grid = |lo: f64, hi: f64| (rng.gen_range(lo..hi) * 20.0f64).round() / 20.0;
    let mut parts = Vec::new();
    let n = (grid(1.0, 3.99)).floor() as usize;
    for _ in 0..n {
        if grid(0.0, 1.0) < 0.5 {
            let c = vec![grid(-0.6, 0.6), grid(-0.6, 0.6)];
            parts.push(Csg::disc(c, grid(0.15, 0.6)));
        } else {
            let (x, y) = (grid(-0.8, 0.3), grid(-0.8, 0.3));
            let (w, t) = (grid(0.1, 0.8), grid(0.1, 0.8));
            parts.push(Csg::rect(vec![x, y], vec![x + w, y + t]));
        }
    }
    let holes: Vec<Csg> =
        (0..(grid(0.0, 2.99)).floor() as usize).map(|_| Csg::disc(vec![grid(-0.6, 0.6), grid(-0.6, 0.6)], grid(0.05, 0.2))).collect();
    if holes.is_empty() {
        Csg::union(parts)
    } else {
        Csg::difference(Csg::union(parts), holes)
    }
}

fn check_inscribe(shape: &Csg, h: f64) -> Verdict {
    let g = match rasterize(shape, None, h) {
        Ok(g) => g,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    if g.is_empty() {
        return Verdict::Skip;
    }
    match largest_inscribed_balls(&g) {
        Ok(b) if b.certificate.holds() => Verdict::Pass(format!("radius {}", b.radius)),
        Ok(b) => Verdict::Fail(format!("certificate failed: {:?}", b.certificate)),
        Err(e) => Verdict::Fail(e.to_string()),
    }
}

fn grid_repro(shape: Csg, h: f64, command: TaskCommand, description: &str) -> SpecDocument {
    SpecDocument {
        description: Some(description.to_string()),
        spaces: Named(vec![("G".into(), SpaceSpec::GridCsg { h, shape, bbox: None })]),
        subsets: Named(vec![("A".into(), SubsetSpec { space: "G".into(), set: None, points: None, shape: None })]),
        tasks: vec![Task { command, subsets: vec!["A".into()], h: None }],
    }
}

/// The mask as a union of lattice points on a unit grid.
fn mask_repro(rows: usize, cols: usize, m: &Mask, description: &str) -> SpecDocument {
    let frame = Csg::rect(vec![0.0, 0.0], vec![(rows - 1) as f64, (cols - 1) as f64]);
    let points = m.ones().map(|i| Csg::Point { at: vec![(i / cols) as f64, (i % cols) as f64] }).collect();
    SpecDocument {
        description: Some(description.to_string()),
        spaces: Named(vec![("G".into(), SpaceSpec::GridCsg { h: 1.0, shape: frame, bbox: None })]),
        subsets: Named(vec![(
            "M".into(),
            SubsetSpec { space: "G".into(), set: None, points: None, shape: Some(Csg::union(points)) },
        )]),
        tasks: vec![Task { command: TaskCommand::Filtrate, subsets: vec!["M".into()], h: None }],
    }
}

/// Random planar mask: independent cells at a random density, or rings toggled on and off.
pub fn random_planar_mask(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mask {
    if rng.gen_bool(0.5) {
        let p = rng.gen_range(0.2..0.8);
        return Mask::from_bits((0..rows * cols).map(|_| rng.gen_bool(p)).collect());
    }
    let rings: Vec<(f64, f64, f64, f64)> = (0..rng.gen_range(1..12))
        .map(|_| {
            let (r, c) = (rng.gen_range(0.0..rows as f64), rng.gen_range(0.0..cols as f64));
            let outer = rng.gen_range(2.0..(rows.min(cols) as f64 / 2.0).max(3.0));
            (r, c, outer, rng.gen_range(0.0..outer))
        })
        .collect();
    Mask::from_fn(rows * cols, |i| {
        let (r, c) = ((i / cols) as f64, (i % cols) as f64);
        rings.iter().filter(|&&(br, bc, outer, inner)| (((r - br).powi(2) + (c - bc).powi(2)).sqrt() - (outer + inner) / 2.0).abs() <= (outer - inner) / 2.0).count() % 2 == 1
    })
}

/// Face-connected components by flood fill.
fn flood_components(rows: usize, cols: usize, s: &Mask) -> i64 {
    let mut seen = vec![false; rows * cols];
    let mut count = 0;
    for start in s.ones() {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (r, c) = (i / cols, i % cols);
            let mut near = Vec::with_capacity(4);
            if r > 0 {
                near.push(i - cols);
            }
            if r + 1 < rows {
                near.push(i + cols);
            }
            if c > 0 {
                near.push(i - 1);
            }
            if c + 1 < cols {
                near.push(i + 1);
            }
            for j in near {
                if s.get(j) && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    count
}

/// `V − E + F` of the cubical complex: a vertex per cell, an edge per face-adjacent pair, a
/// square per full 2×2 block.
fn euler_characteristic(rows: usize, cols: usize, s: &Mask) -> i64 {
    let at = |r: usize, c: usize| s.get(r * cols + c);
    let (mut v, mut e, mut f) = (0i64, 0i64, 0i64);
    for r in 0..rows {
        for c in 0..cols {
            if !at(r, c) {
                continue;
            }
            v += 1;
            e += i64::from(c + 1 < cols && at(r, c + 1)) + i64::from(r + 1 < rows && at(r + 1, c));
            f += i64::from(r + 1 < rows && c + 1 < cols && at(r, c + 1) && at(r + 1, c) && at(r + 1, c + 1));
        }
    }
    v - e + f
}

fn check_betti(rows: usize, cols: usize, m: &Mask) -> Verdict {
    let grid = GridShape::new(&[rows, cols]);
    let b0 = betti0_cells(&grid, m) as i64;
    let flood = flood_components(rows, cols, m);
    if b0 != flood {
        return Verdict::Fail(format!("{rows}x{cols}: β₀ {b0}, flood fill {flood}"));
    }
    let b1 = match betti1_planar(&grid, m) {
        Ok(b) => b as i64,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let euler = flood - euler_characteristic(rows, cols, m);
    if b1 != euler {
        return Verdict::Fail(format!("{rows}x{cols}: β₁ {b1}, β₀ − χ = {euler}"));
    }
    Verdict::Pass(format!("{rows}x{cols}: β₀ {b0}, β₁ {b1}"))
}
