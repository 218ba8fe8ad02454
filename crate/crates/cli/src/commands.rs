//! The per-target commands: each takes resolved subsets and returns an [`Outcome`].

use std::sync::Arc;

use metric_center::filtration::{conjecture_scan, Filtration, SetSize};
use metric_center::finite::{descriptors_bf_with_fields, FiniteSpace};
use metric_center::grid::{descriptors_grid, largest_inscribed_balls, GridRegion, CENTER_BAND};
use metric_center::line::descriptors_line;
use metric_center::product::{product_center, product_center_n, product_oracle, Factor, ProductCenter};
use metric_center::rational::rational_from_f64;
use metric_center::union::{union_descriptors, union_descriptors_n, SradBounds, UnionPart, UnionSpace};
use metric_center::{ext_cmp, report_consistency_check, report_consistency_check_within, AnySet, DescriptorReport, ExtReal, IntervalSet, Mask};

use crate::emit::{compact, coord_header, ext, flag, float, point, size, yes, Outcome, Summary, Table};
use crate::workspace::{Resolved, Space};
use crate::CliError;

fn engine_err(target: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{target}: {e}"))
}

/// Short description of a point set: the points themselves when few, otherwise a count and
/// the bounding box of their coordinates.
fn describe_cells(space: &Space, m: &Mask) -> String {
    let coords = |i: usize| -> Option<Vec<f64>> {
        match space {
            Space::Grid(g) => Some(g.center(i)),
            Space::Finite(x) => x.coords(i).map(<[f64]>::to_vec),
            Space::Line(_) => None,
        }
    };
    let n = m.count();
    if n == 0 {
        return "empty".into();
    }
    let pts: Vec<Option<Vec<f64>>> = m.ones().map(coords).collect();
    if n <= 6 {
        let shown: Vec<String> =
            m.ones().zip(&pts).map(|(i, p)| p.as_ref().map_or_else(|| format!("#{i}"), |p| point(p))).collect();
        return format!("{n} point(s): {}", shown.join(", "));
    }
    let Some(pts) = pts.into_iter().collect::<Option<Vec<Vec<f64>>>>() else {
        return format!("{n} points");
    };
    let dim = pts[0].len();
    let lo: Vec<f64> = (0..dim).map(|k| pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..dim).map(|k| pts.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    format!("{n} points within {} to {}", point(&lo), point(&hi))
}

fn describe(space: &Space, s: &AnySet) -> String {
    match s {
        AnySet::Line(l) if l.is_empty() => "{}".into(),
        AnySet::Line(l) => l.to_string(),
        AnySet::Cells(m) => describe_cells(space, m),
    }
}

fn descriptor_summary(s: &mut Summary, space: &Space, r: &DescriptorReport<AnySet>) {
    s.add("boundary", describe(space, &r.boundary))
        .add("interior nonempty", yes(r.interior_nonempty))
        .add("clopen", yes(r.clopen))
        .add("center", describe(space, &r.center))
        .add("radius", ext(&r.radius))
        .add("semi-radius", ext(&r.semi_radius))
        .add("quasi-center", describe(space, &r.quasi_center))
        .add("quasi-radius", ext(&r.quasi_radius))
        .add("semi-quasi-radius", ext(&r.semi_quasi_radius))
        .add("diameter", ext(&r.diameter));
    for n in &r.notes {
        s.add("note", n);
    }
}

fn resolution(space: &Space) -> Option<f64> {
    match space {
        Space::Line(_) => None,
        Space::Finite(x) => Some(x.h()),
        Space::Grid(g) => Some(g.h()),
    }
}

fn header(s: &mut Summary, command: &str, targets: &str, space: &Space) {
    s.add("command", command).add("target", targets).add("engine", space.engine());
    match space {
        Space::Line(y) => {
            s.add("ambient", y).add("h", "exact").add("tolerance", "0");
        }
        Space::Finite(x) => {
            s.add("points", x.len()).add("h", float(x.h())).add("tolerance", format!("h-topology and center band tau = h = {}", float(x.h())));
        }
        Space::Grid(g) => {
            let dims: Vec<String> = g.extent().iter().map(ToString::to_string).collect();
            s.add("grid", dims.join("x")).add("h", float(g.h())).add(
                "tolerance",
                format!("center band {CENTER_BAND}h = {}; one-sided boundary cells", float(CENTER_BAND * g.h())),
            );
        }
    }
}

/// Per-point rows: index, coordinates, distances to the boundary and the complement, and
/// center / quasi-center membership.
fn point_table(coords: &dyn Fn(usize) -> Option<Vec<f64>>, dim: usize, r: &DescriptorReport<AnySet>, to_b: &dyn Fn(usize) -> f64, to_c: &dyn Fn(usize) -> f64) -> Table {
    let mut head = vec!["cell".to_string()];
    head.extend(coord_header(dim));
    head.extend(["d_boundary", "d_complement", "in_center", "in_qcenter"].map(String::from));
    let mut t = Table::new(&head);
    let (a, c, q) = (r.subset.as_cells().unwrap(), r.center.as_cells().unwrap(), r.quasi_center.as_cells().unwrap());
    for i in a.ones() {
        let mut row = vec![i.to_string()];
        if let Some(p) = coords(i) {
            row.extend(p.iter().map(|&x| float(x)));
        }
        row.extend([float(to_b(i)), float(to_c(i)), flag(c.get(i)).into(), flag(q.get(i)).into()]);
        t.row(&row);
    }
    t
}

pub fn analyze(t: &Resolved) -> Result<Outcome, CliError> {
    let mut s = Summary::default();
    header(&mut s, "analyze", &t.name, &t.space);
    let (csv_table, report, violations) = match (&t.space, &t.set) {
        (Space::Line(y), AnySet::Line(a)) => {
            let r = descriptors_line(a, y).map_err(|e| engine_err(&t.name, e))?;
            let v = report_consistency_check(&r);
            let r = r.map_sets(AnySet::Line);
            let mut table = Table::new(&["descriptor", "value"]);
            table.row(&["subset", &a.to_string()]);
            for (k, v) in descriptor_rows(&t.space, &r) {
                table.row(&[k, &v]);
            }
            (table, r, v)
        }
        (Space::Finite(x), AnySet::Cells(a)) => {
            let (r, f) = descriptors_bf_with_fields(x, a);
            let v = report_consistency_check(&r);
            let dim = x.dim().unwrap_or(0);
            let r = r.map_sets(AnySet::Cells);
            let coords = |i: usize| x.coords(i).map(<[f64]>::to_vec);
            let table = point_table(&coords, dim, &r, &|i| f.to_boundary[i], &|i| f.to_complement[i]);
            (table, r, v)
        }
        (Space::Grid(g), AnySet::Cells(a)) => {
            let region = g.with_occupancy(a.clone());
            let (r, f) = descriptors_grid(&region);
            let v = report_consistency_check_within(&r, g.h() * (1.0 + 1e-9));
            let r = r.map_sets(AnySet::Cells);
            let coords = |i: usize| Some(region.center(i));
            let table = point_table(&coords, g.dim(), &r, &|i| f.to_boundary.value(i), &|i| f.to_complement.value(i));
            (table, r, v)
        }
        _ => unreachable!("subsets match their spaces"),
    };
    s.add("subset", describe(&t.space, &t.set));
    descriptor_summary(&mut s, &t.space, &report);
    let violations: Vec<String> = violations.iter().map(ToString::to_string).collect();
    s.add("consistency", if violations.is_empty() { "ok".to_string() } else { violations.join("; ") });
    Ok(Outcome { target: t.name.clone(), csv: csv_table.finish(&s), text: s.text(), violations })
}

fn descriptor_rows(space: &Space, r: &DescriptorReport<AnySet>) -> Vec<(&'static str, String)> {
    vec![
        ("boundary", describe(space, &r.boundary)),
        ("interior_nonempty", yes(r.interior_nonempty).into()),
        ("clopen", yes(r.clopen).into()),
        ("center", describe(space, &r.center)),
        ("radius", ext(&r.radius)),
        ("semi_radius", ext(&r.semi_radius)),
        ("quasi_center", describe(space, &r.quasi_center)),
        ("quasi_radius", ext(&r.quasi_radius)),
        ("semi_quasi_radius", ext(&r.semi_quasi_radius)),
        ("diameter", ext(&r.diameter)),
    ]
}

fn grid_region(t: &Resolved, command: &str) -> Result<GridRegion, CliError> {
    t.region().ok_or_else(|| CliError::Usage(format!("{command} needs a grid subset; '{}' lives in a {} space", t.name, t.space.engine())))
}

pub fn inscribe(t: &Resolved) -> Result<Outcome, CliError> {
    let g = grid_region(t, "inscribe")?;
    let b = largest_inscribed_balls(&g).map_err(|e| engine_err(&t.name, e))?;
    let mut s = Summary::default();
    header(&mut s, "inscribe", &t.name, &t.space);
    s.add("subset", describe(&t.space, &t.set))
        .add("radius", ext(&b.radius))
        .add("centers", describe_cells(&t.space, &b.centers))
        .add("certificate", if b.certificate.holds() { "ok" } else { "failed" })
        .add("certificate inside", yes(b.certificate.inside))
        .add("certificate maximal", yes(b.certificate.maximal));
    if let Some(w) = b.certificate.witness {
        s.add("certificate witness", format!("cell {w} at {}", point(&g.center(w))));
    }
    let mut head = vec!["cell".to_string()];
    head.extend(coord_header(g.dim()));
    head.push("radius".into());
    let mut table = Table::new(&head);
    for i in b.centers.ones() {
        let mut row = vec![i.to_string()];
        row.extend(g.center(i).iter().map(|&x| float(x)));
        row.push(ext(&b.radius));
        table.row(&row);
    }
    let violations = if b.certificate.holds() { vec![] } else { vec![format!("inscribed-ball certificate failed: {:?}", b.certificate)] };
    Ok(Outcome { target: t.name.clone(), csv: table.finish(&s), text: s.text(), violations })
}

pub fn filtrate(t: &Resolved) -> Result<Outcome, CliError> {
    let f = match (&t.space, &t.set) {
        (Space::Line(y), AnySet::Line(a)) => Filtration::line(a, y).map_err(|e| engine_err(&t.name, e))?,
        (Space::Grid(_), _) => Filtration::grid(Arc::new(grid_region(t, "filtrate")?)),
        _ => return Err(CliError::Usage(format!("filtrate needs a line or grid subset; '{}' is finite", t.name))),
    };
    let r = conjecture_scan(&f, None).map_err(|e| engine_err(&t.name, e))?;
    let mut s = Summary::default();
    header(&mut s, "filtrate", &t.name, &t.space);
    let alpha_star = r.alpha_star.as_ref().map_or_else(|| "none".to_string(), ext);
    s.add("subset", describe(&t.space, &t.set))
        .add("dimension", r.dimension)
        .add("radius", ext(&r.radius))
        .add("thresholds", f.thresholds().len())
        .add("betti of subset", r.betti_subset)
        .add("betti0 of center", r.betti0_center)
        .add("target count", r.target)
        .add("alpha*", alpha_star)
        .add("verdict", r.verdict.as_str())
        .add("center excluded", yes(r.center_excluded));
    for n in &r.notes {
        s.add("note", n);
    }
    let mut rows = r.rows.clone();
    rows.sort_by(|a, b| ext_cmp(&a.alpha, &b.alpha).expect("one regime"));
    let mut table = Table::new(&["alpha", "betti0", "betti1", "size", "center_excluded"]);
    for row in &rows {
        let size = match &row.size {
            SetSize::Length(v) => ext(v),
            SetSize::Cells(n) => n.to_string(),
        };
        let b1 = row.betti1.map_or_else(String::new, |b| b.to_string());
        table.row(&[ext(&row.alpha), row.betti0.to_string(), b1, size, flag(row.center_excluded).into()]);
    }
    let mut text = s.text();
    text.push_str("alpha  betti0  betti1  size\n");
    for row in &rows {
        let b1 = row.betti1.map_or_else(|| "-".to_string(), |b| b.to_string());
        text.push_str(&format!("{}  {}  {}  {}\n", ext(&row.alpha), row.betti0, b1, row.size));
    }
    let violations =
        if r.center_excluded { vec![] } else { vec!["a sublevel set below the radius meets the center".to_string()] };
    Ok(Outcome { target: t.name.clone(), csv: table.finish(&s), text, violations })
}

fn factor(t: &Resolved) -> Factor {
    match (&t.space, &t.set) {
        (Space::Line(y), AnySet::Line(a)) => Factor::line(a.clone(), y.clone()),
        (Space::Finite(x), AnySet::Cells(m)) => Factor::Finite { space: x.clone(), subset: m.clone() },
        (Space::Grid(_), _) => Factor::Grid(Arc::new(t.region().expect("grid subset"))),
        _ => unreachable!("subsets match their spaces"),
    }
}

/// Largest max-metric distance from an oracle center point to the formula's center, when
/// every factor has coordinates or point indices to measure with.
fn center_deviation(factors: &[Factor], p: &ProductCenter, oracle: &FiniteSpace, centers: &Mask) -> Option<f64> {
    let mut offsets = Vec::new();
    let mut at = 0;
    for f in factors {
        offsets.push(at);
        at += match f {
            Factor::Line { .. } => 1,
            Factor::Grid(g) => g.dim(),
            Factor::Finite { space, .. } => space.dim().unwrap_or(0),
        };
    }
    let mut worst: f64 = 0.0;
    for i in centers.ones() {
        let idx = oracle.product_index(i)?;
        let mut d: f64 = 0.0;
        for (k, f) in factors.iter().enumerate() {
            let dk = match (f, &p.center[k]) {
                (Factor::Line { .. }, AnySet::Line(c)) => {
                    let x = oracle.coords(i)?[offsets[k]];
                    let q = rational_from_f64(x)?;
                    c.closure().distance_to(&q).map_or(f64::INFINITY, |v| metric_center::rational::rational_to_f64(&v))
                }
                (Factor::Grid(g), AnySet::Cells(c)) => {
                    let x = g.center(idx[k]);
                    c.ones().map(|j| euclid(&x, &g.center(j))).fold(f64::INFINITY, f64::min)
                }
                (Factor::Finite { space, .. }, AnySet::Cells(c)) => {
                    c.ones().map(|j| space.dist(idx[k], j)).fold(f64::INFINITY, f64::min)
                }
                _ => return None,
            };
            d = d.max(dk);
        }
        worst = worst.max(d);
    }
    Some(worst)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn product(targets: &[Resolved], oracle_h: Option<f64>) -> Result<Outcome, CliError> {
    let names: Vec<&str> = targets.iter().map(|t| t.name.as_str()).collect();
    let label = names.join(" x ");
    if targets.len() < 2 {
        return Err(CliError::Usage(format!("product needs at least two subsets, got {}", targets.len())));
    }
    let factors: Vec<Factor> = targets.iter().map(factor).collect();
    let p = if factors.len() == 2 { product_center(&factors[0], &factors[1]) } else { product_center_n(&factors) }
        .map_err(|e| engine_err(&label, e))?;
    let mut s = Summary::default();
    s.add("command", "product").add("target", &label).add("case", p.case.as_str());
    s.add("center", p.to_string()).add("radius", ext(&p.radius)).add("threshold", ext(&p.threshold));
    let mut table = Table::new(&["factor", "subset", "engine", "h", "radius", "semi_radius", "clopen", "center", "center_size"]);
    for (k, (t, f)) in targets.iter().zip(&factors).enumerate() {
        let sum = f.summarize().map_err(|e| engine_err(&t.name, e))?;
        let h = resolution(&t.space).map_or_else(|| "exact".to_string(), float);
        table.row(&[
            k.to_string(),
            t.name.clone(),
            t.space.engine().to_string(),
            h,
            ext(&sum.radius),
            ext(&sum.semi_radius),
            yes(sum.clopen).to_string(),
            describe(&t.space, &p.center[k]),
            size(&p.center[k]),
        ]);
        s.add(&format!("factor {k}"), format!("{} ({}), radius {}, semi-radius {}", t.name, t.space.engine(), sum.radius, sum.semi_radius));
    }
    let mut violations = Vec::new();
    if let Some(h) = oracle_h {
        let o = product_oracle(&factors, h).map_err(|e| engine_err(&label, e))?;
        let (ro, rf) = (o.report.radius.to_f64(), p.radius.to_f64());
        let dev = if ro.is_infinite() && rf.is_infinite() { 0.0 } else { (ro - rf).abs() };
        let scale = targets.iter().filter_map(|t| resolution(&t.space)).fold(h, f64::max);
        let tolerance = 4.0 * scale;
        s.add("oracle h", float(h))
            .add("oracle points", o.space.len())
            .add("oracle radius", ext(&o.report.radius))
            .add("oracle radius deviation", float(dev))
            .add("oracle tolerance", float(tolerance));
        // Two-sided when every factor is a bounded line set; otherwise only how far oracle
        // center points lie from the formula's center.
        let lines: Option<Vec<IntervalSet>> = p.center.iter().map(|c| c.as_line().filter(|l| l.is_bounded()).cloned()).collect();
        match lines {
            Some(lines) => {
                let pts: Vec<Vec<f64>> = o.report.center.ones().filter_map(|i| o.space.coords(i).map(<[f64]>::to_vec)).collect();
                let hd = crate::verify::hausdorff_to_product(&lines, &pts, h / 2.0);
                s.add("oracle center hausdorff", float(hd));
                if hd > tolerance {
                    violations.push(format!("oracle center is {hd} from the formula center, more than {tolerance}"));
                }
            }
            None => {
                match center_deviation(&factors, &p, &o.space, &o.report.center) {
                    Some(d) => s.add("oracle center deviation", float(d)),
                    None => s.add("oracle center deviation", "not measured: a factor has no coordinates"),
                };
            }
        }
        if dev > tolerance {
            violations.push(format!("oracle radius {ro} deviates from the formula radius {rf} by more than {tolerance}"));
        }
    }
    Ok(Outcome { target: label, csv: table.finish(&s), text: s.text(), violations })
}

fn union_space(targets: &[Resolved]) -> Result<UnionSpace, CliError> {
    let first = &targets[0];
    if let Some(t) = targets.iter().find(|t| t.space_name != first.space_name) {
        return Err(CliError::Usage(format!("union parts must share a space: '{}' is in '{}', '{}' in '{}'", first.name, first.space_name, t.name, t.space_name)));
    }
    Ok(match &first.space {
        Space::Line(y) => UnionSpace::Line(y.clone()),
        Space::Finite(x) => UnionSpace::Finite(x.clone()),
        Space::Grid(g) => UnionSpace::Grid(g.clone()),
    })
}

/// Hausdorff distance between two point sets of one space; 0 or `inf` when either is empty.
fn hausdorff(space: &Space, a: &AnySet, b: &AnySet) -> Option<f64> {
    let (AnySet::Cells(a), AnySet::Cells(b)) = (a, b) else { return None };
    if a.none() || b.none() {
        return Some(if a.none() && b.none() { 0.0 } else { f64::INFINITY });
    }
    let d = |i: usize, j: usize| match space {
        Space::Finite(x) => x.dist(i, j),
        Space::Grid(g) => euclid(&g.center(i), &g.center(j)),
        Space::Line(_) => unreachable!("line sets are compared exactly"),
    };
    let one_way = |p: &Mask, q: &Mask| p.ones().map(|i| q.ones().map(|j| d(i, j)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    Some(one_way(a, b).max(one_way(b, a)))
}

/// The fields shared by two-part and many-part union reports.
struct UnionView {
    case: &'static str,
    parts: Vec<UnionPart>,
    center: Option<AnySet>,
    radius: Option<ExtReal>,
    bounds: SradBounds,
    direct: DescriptorReport<AnySet>,
    warnings: Vec<String>,
}

pub fn union(targets: &[Resolved]) -> Result<Outcome, CliError> {
    let names: Vec<&str> = targets.iter().map(|t| t.name.as_str()).collect();
    let label = names.join(" u ");
    if targets.len() < 2 {
        return Err(CliError::Usage(format!("union needs at least two subsets, got {}", targets.len())));
    }
    let space = union_space(targets)?;
    let sets: Vec<AnySet> = targets.iter().map(|t| t.set.clone()).collect();
    let UnionView { case, parts, center, radius, bounds, direct, warnings } = if sets.len() == 2 {
        let u = union_descriptors(&space, &sets[0], &sets[1]).map_err(|e| engine_err(&label, e))?;
        UnionView { case: u.case.as_str(), parts: u.parts, center: u.center, radius: u.radius, bounds: u.semi_radius, direct: u.direct, warnings: u.warnings }
    } else {
        let u = union_descriptors_n(&space, &sets).map_err(|e| engine_err(&label, e))?;
        let case = if u.center.is_some() { "n-part-determined" } else { "n-part-bounds-only" };
        UnionView { case, parts: u.parts, center: u.center, radius: u.radius, bounds: u.semi_radius, direct: u.direct, warnings: u.warnings }
    };
    let max_radius = parts.iter().map(|p| p.report.radius.clone()).reduce(|a, b| metric_center::ext_max(&a, &b).expect("one regime")).expect("two parts");
    let members: Vec<usize> = (0..parts.len()).filter(|&i| parts[i].report.radius == max_radius && !parts[i].survivors.is_empty()).collect();
    let sp = &targets[0].space;
    let tol = space.tolerance();

    let mut s = Summary::default();
    header(&mut s, "union", &label, sp);
    s.add("case", case)
        .add("path metric", yes(space.path_metric()))
        .add("M (parts whose centers survive at the largest radius)", if members.is_empty() { "none".to_string() } else { members.iter().map(|&i| names[i]).collect::<Vec<_>>().join(", ") })
        .add("center", center.as_ref().map_or_else(|| "undetermined".to_string(), |c| describe(sp, c)))
        .add("radius", radius.as_ref().map_or_else(|| "undetermined".to_string(), ext))
        .add("semi-radius bounds", bounds.to_string())
        .add("direct center", describe(sp, &direct.center))
        .add("direct radius", ext(&direct.radius))
        .add("direct semi-radius", ext(&direct.semi_radius));

    let mut violations = Vec::new();
    let srad_ok = if tol == 0.0 { bounds.contains(&direct.semi_radius) } else { bounds.contains_within(&direct.semi_radius, 2.0 * tol) };
    if !srad_ok {
        violations.push(format!("direct semi-radius {} lies outside {}", direct.semi_radius, bounds));
    }
    match (&center, &radius, sp) {
        (Some(c), Some(r), Space::Line(_)) => {
            let same = *c == direct.center && *r == direct.radius;
            s.add("oracle deviation", if same { "0 (exact match)" } else { "mismatch" });
            if !same {
                violations.push(format!("formula center {c} / radius {r} differ from the direct {} / {}", direct.center, direct.radius));
            }
        }
        (Some(c), Some(r), _) => {
            let hd = hausdorff(sp, c, &direct.center).unwrap_or(f64::NAN);
            let rd = (r.to_f64() - direct.radius.to_f64()).abs();
            s.add("oracle deviation", format!("center Hausdorff {}, radius {}", float(hd), float(if rd.is_nan() { 0.0 } else { rd })));
        }
        _ => {
            s.add("oracle deviation", "not applicable: the formula only bounds the semi-radius");
        }
    }
    for w in &warnings {
        s.add("warning", w);
    }

    let mut table = Table::new(&["part", "subset", "radius", "semi_radius", "center", "tilde", "survivors", "double_tilde", "in_m"]);
    for (k, p) in parts.iter().enumerate() {
        table.row(&[
            k.to_string(),
            names[k].to_string(),
            ext(&p.report.radius),
            ext(&p.report.semi_radius),
            compact(&p.report.center),
            compact(&p.tilde),
            compact(&p.survivors),
            p.double_tilde.as_ref().map_or_else(String::new, compact),
            flag(members.contains(&k)).to_string(),
        ]);
    }
    let mut text = s.text();
    for (k, p) in parts.iter().enumerate() {
        text.push_str(&format!(
            "part {} ({}): radius {}, tilde {}, survivors {}\n",
            k,
            names[k],
            p.report.radius,
            compact(&p.tilde),
            compact(&p.survivors)
        ));
    }
    Ok(Outcome { target: label, csv: table.finish(&s), text, violations })
}
