use std::fs;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use contcalc_core::catalog::Catalog;
use contcalc_core::chain::{chain_indexed, chain_unary, counterexample_bz2, ChainReport};
use contcalc_core::container::{
    bag_fixed_point_check, candidate_count, const_c, derivative, enumerate_carts, fin_tuple, hom_count, idc,
    io::write_container, iterated_derivative, law_leibniz, law_sum, naturality_check, prod_c, triangle_check,
    with_hole, Container, X,
};
use contcalc_core::dsl::SignatureAst;
use contcalc_core::fixpoint::{
    count_algebra, decompose, down, enumerate_wtrees, fill, in_out, mu_container, mu_rule, rec, up, wpaths, Signature,
    WPath, ZipperValue,
};
use contcalc_core::groupoid::disc;
use contcalc_core::Limits;
use serde_json::{json, Value};

use crate::inputs;
use crate::report::Report;

/// Largest search space the hom-count identities are checked on.
const HOM_CAP: u128 = 10_000;

#[derive(Clone, Copy)]
pub struct Opts {
    pub seed: u64,
    pub depth: Option<usize>,
    pub max_size: Option<usize>,
    pub limits: Limits,
}

/// Per-shape position counts at every index, e.g. `[1,2]` or `[1,2|0,0]`.
fn sizes(c: &Container) -> String {
    let per_index: Vec<String> = (0..c.indices.len())
        .map(|i| {
            let v: Vec<String> = (0..c.num_shapes()).map(|s| c.fiber(i, s).num_objects().to_string()).collect();
            v.join(",")
        })
        .collect();
    format!("[{}]", per_index.join("|"))
}

fn total_positions(c: &Container, i: usize) -> usize {
    (0..c.num_shapes()).map(|s| c.fiber(i, s).num_objects()).sum()
}

pub fn discrete_pairs(seed: u64, count: usize) -> Vec<(Container, Container)> {
    let mut cat = Catalog::new(seed);
    (0..count)
        .map(|_| (cat.discrete_container(&[X], 3, 3), cat.discrete_container(&[X], 3, 3)))
        .collect()
}

/// Unary containers with groupoid shapes and positions, small enough for the
/// chain rule's functor groupoids.
pub fn groupoid_pairs(seed: u64, count: usize) -> Vec<(Container, Container)> {
    let mut cat = Catalog::new(seed ^ 0x9e37_79b9).with_max_fiber(3);
    (0..count)
        .map(|_| (cat.groupoid_container(&[X], 2, 4), cat.groupoid_container(&[X], 3, 6)))
        .collect()
}

fn pairs_from_files(lhs: &Option<String>, rhs: &Option<String>, limits: &Limits) -> Result<Option<(Container, Container)>> {
    match (lhs, rhs) {
        (Some(l), Some(r)) => Ok(Some((inputs::container(l, limits)?.0, inputs::container(r, limits)?.0))),
        (None, None) => Ok(None),
        _ => bail!("--lhs and --rhs go together"),
    }
}

fn basic_derivatives(rep: &mut Report) -> Result<()> {
    let did = derivative(&idc(), X)?.container;
    let id_ok = did.num_shapes() == 1 && total_positions(&did, 0) == 0;
    let dconst = derivative(&const_c(&[X], disc(3)), X)?.container;
    let const_ok = dconst.num_shapes() == 0;
    rep.metric("derivative_of_identity_is_one", id_ok);
    rep.metric("derivative_of_constant_is_zero", const_ok);
    rep.require(id_ok && const_ok, || json!({"basic": "derivatives of Id and const"}));
    Ok(())
}

/// `check sum` and `check leibniz` on the catalog or on one pair of files.
pub fn check_law(law: &str, opts: &Opts, count: usize, lhs: &Option<String>, rhs: &Option<String>, index: &Option<String>) -> Result<Report> {
    let pairs = match pairs_from_files(lhs, rhs, &opts.limits)? {
        Some(p) => vec![p],
        None => discrete_pairs(opts.seed, count),
    };
    let mut rep = Report::new(format!("check {law}"));
    let (mut holds, mut counts_exact) = (0, 0);
    for (k, (f, g)) in pairs.iter().enumerate() {
        let i = index.clone().unwrap_or_else(|| f.indices[0].clone());
        let ix = f.index_of(&i)?;
        let jx = g.index_of(&i)?;
        rep.instances.push(format!("F{k}={} G{k}={}", sizes(f), sizes(g)));
        let r = if law == "sum" { law_sum(f, g, &i)? } else { law_leibniz(f, g, &i)? };
        let (nf, ng) = (f.num_shapes(), g.num_shapes());
        let (pf, pg) = (total_positions(f, ix), total_positions(g, jx));
        let expected = if law == "sum" { pf + pg } else { ng * pf + nf * pg };
        let exact = r.morphism.source.num_shapes() == expected && r.morphism.target.num_shapes() == expected;
        holds += usize::from(r.holds());
        counts_exact += usize::from(exact);
        rep.require(r.holds() && exact, || {
            json!({"instance": k, "expected_shapes": expected, "report": r.to_json()})
        });
    }
    rep.metric("pairs", pairs.len());
    rep.metric("equivalences", holds);
    rep.metric("shape_counts_exact", counts_exact);
    basic_derivatives(&mut rep)?;
    Ok(rep)
}

pub fn check_adjunction(opts: &Opts, count: usize) -> Result<Report> {
    let pairs = discrete_pairs(opts.seed, count);
    let mut rep = Report::new("check adjunction");
    let (mut triangles, mut squares, mut square_failures) = (0, 0, 0);
    let (mut hom_checked, mut hom_exact, mut iter_checked, mut iter_exact) = (0, 0, 0, 0);
    for (k, (f, g)) in pairs.iter().enumerate() {
        rep.instances.push(format!("F{k}={} G{k}={}", sizes(f), sizes(g)));
        let (fa, ga) = (Arc::new(f.clone()), Arc::new(g.clone()));
        let t = triangle_check(&fa, &ga, X)?;
        triangles += usize::from(t.passed());
        rep.require(t.passed(), || json!({"instance": k, "triangles": t}));
        if candidate_count(f, g)?.candidates <= HOM_CAP {
            for m in enumerate_carts(&fa, &ga, &opts.limits)?.iter().take(3) {
                let (eta, eps) = naturality_check(m, X)?;
                squares += 2;
                square_failures += usize::from(!eta) + usize::from(!eps);
                rep.require(eta && eps, || json!({"instance": k, "naturality": [eta, eps]}));
            }
        }
        let dg = derivative(g, X)?.container;
        let fx = with_hole(f, X)?;
        if candidate_count(f, &dg)?.candidates <= HOM_CAP && candidate_count(&fx, g)?.candidates <= HOM_CAP {
            let (a, b) = (hom_count(f, &dg, &opts.limits)?, hom_count(&fx, g, &opts.limits)?);
            hom_checked += 1;
            hom_exact += usize::from(a == b);
            rep.require(a == b, || json!({"instance": k, "hom_derivative": a, "hom_with_hole": b}));
        }
        let mut levels = 0;
        let mut exact = true;
        for n in 1..=3 {
            let dn = iterated_derivative(g, X, n)?;
            let fxn = prod_c(f, &fin_tuple(n))?;
            if candidate_count(f, &dn)?.candidates > HOM_CAP || candidate_count(&fxn, g)?.candidates > HOM_CAP {
                break;
            }
            let (a, b) = (hom_count(f, &dn, &opts.limits)?, hom_count(&fxn, g, &opts.limits)?);
            levels += 1;
            exact &= a == b;
            rep.require(a == b, || json!({"instance": k, "n": n, "hom_iterated": a, "hom_tuple": b}));
        }
        if levels == 3 {
            iter_checked += 1;
            iter_exact += usize::from(exact);
        }
    }
    rep.metric("pairs", pairs.len());
    rep.metric("triangles", triangles);
    rep.metric("naturality_squares", squares);
    rep.metric("naturality_failures", square_failures);
    rep.metric("hom_count_checked", hom_checked);
    rep.metric("hom_count_exact", hom_exact);
    rep.metric("iterated_checked", iter_checked);
    rep.metric("iterated_exact", iter_exact);
    Ok(rep)
}

fn chain_json(r: &ChainReport) -> Value {
    r.to_json()
}

pub fn check_chain(opts: &Opts, count: usize, counterexample: &Option<String>, lhs: &Option<String>, rhs: &Option<String>, index: &Option<String>) -> Result<Report> {
    if let Some(name) = counterexample {
        return match name.as_str() {
            "bz2" => counterexample_report("check chain --counterexample bz2"),
            other => bail!("unknown counterexample `{other}` (known: bz2)"),
        };
    }
    let mut rep = Report::new("check chain");
    if let (Some(l), Some(r)) = (lhs, rhs) {
        let (f, star) = inputs::container(l, &opts.limits)?;
        let (g, _) = inputs::container(r, &opts.limits)?;
        let r = match star {
            Some(star) => {
                let i = index.clone().unwrap_or_else(|| g.indices[0].clone());
                chain_indexed(&f, &star, &g, &i, &opts.limits)?
            }
            None => chain_unary(&f, &g, &opts.limits)?,
        };
        rep.instances.push(format!("{l} ∘ {}", rhs.as_deref().unwrap_or_default()));
        rep.require(r.valid && r.is_embedding, || chain_json(&r));
        rep.metrics = chain_json(&r).as_object().cloned().unwrap_or_default();
        return Ok(rep);
    }
    pairs_from_files(lhs, rhs, &opts.limits)?;
    let mut rows = [(0usize, 0usize, 0usize, 0usize); 2];
    for (kind, pairs) in [discrete_pairs(opts.seed, count), groupoid_pairs(opts.seed, count)].iter().enumerate() {
        for (k, (f, g)) in pairs.iter().enumerate() {
            let r = chain_unary(f, g, &opts.limits)?;
            let row = &mut rows[kind];
            row.0 += 1;
            row.1 += usize::from(r.valid && r.is_embedding);
            row.2 += usize::from(r.is_strong);
            row.3 += usize::from(r.is_strong == r.sigma_isolate_strong);
            let discrete = kind == 0;
            rep.require(
                r.valid && r.is_embedding && (!discrete || r.is_strong) && r.is_strong == r.sigma_isolate_strong,
                || json!({"instance": k, "discrete": discrete, "report": chain_json(&r)}),
            );
        }
    }
    for (name, row) in ["discrete", "groupoid"].iter().zip(rows) {
        rep.instances.push(format!("{} {name} pairs, seed {}", row.0, opts.seed));
        rep.metric(&format!("{name}_pairs"), row.0);
        rep.metric(&format!("{name}_embeddings"), row.1);
        rep.metric(&format!("{name}_strong"), row.2);
        rep.metric(&format!("{name}_flags_agree"), row.3);
    }
    Ok(rep)
}

pub fn counterexample_report(command: &str) -> Result<Report> {
    let ex = counterexample_bz2()?;
    let r = &ex.report;
    let mut rep = Report::new(command);
    rep.instances.push("F = 1 ◁ BZ2, G = (a : BZ2) ◁ hom(*, a)".into());
    rep.metrics = ex.to_json().as_object().cloned().unwrap_or_default();
    let expected = r.valid && r.is_embedding && !r.is_strong && r.domain_shapes() == 0 && ex.over_identity == 1;
    rep.require(expected, || ex.to_json());
    rep.lines.push(format!(
        "  chain rule is an embedding with {} domain shapes; ∂(F[G]) has {} isolated shape(s) over the identity",
        r.domain_shapes(),
        ex.over_identity
    ));
    Ok(rep)
}

pub fn check_bag(opts: &Opts) -> Result<Report> {
    let n = opts.max_size.unwrap_or(3);
    let mut rep = Report::new("check bag");
    for k in 1..=n {
        let b = bag_fixed_point_check(k)?;
        rep.instances.push(format!("Bag{k}"));
        rep.metric(&format!("bag{k}_derivative_orders"), json!(b.derivative_orders));
        rep.metric(&format!("bag{k}_equivalent_to_bag{}", k - 1), b.equivalent_to_smaller_bag);
        rep.require(b.passed(), || json!(b));
    }
    Ok(rep)
}

pub fn mu(command: &str, sig: &Signature, opts: &Opts, index: &Option<String>, check: &str) -> Result<Report> {
    let depth = opts.depth.unwrap_or(4);
    if depth == 0 {
        bail!("--depth must be at least 1");
    }
    if !["all", "in-out", "rec", "rule"].contains(&check) {
        bail!("unknown check `{check}` (all, in-out, rec, rule)");
    }
    let i = match index {
        Some(i) => i.clone(),
        None => sig.params()[0].clone(),
    };
    let limits = &opts.limits;
    let mut rep = Report::new(command);
    rep.instances.push(format!("{} depth {depth} at {i}", sig.name));
    let run = |c: &str| check == "all" || check == c;
    if sig.is_discrete() {
        let trees = enumerate_wtrees(sig, depth, limits)?;
        rep.metric("trees", trees.len());
        if run("in-out") {
            let io = in_out(sig, depth, limits)?;
            let (a, b) = io.roundtrips()?;
            rep.metric("in_out_roundtrip", a);
            rep.metric("out_in_roundtrip", b);
            rep.require(a && b, || json!({"in_out": [a, b]}));
        }
        if run("rec") && sig.params().len() == 1 {
            let alg = count_algebra(sig, depth, limits)?;
            let r = rec(sig, &alg, depth, limits)?;
            let mu = mu_container(sig, depth, limits)?;
            let mut counts_exact = true;
            for (t, w) in mu.trees.iter().enumerate() {
                counts_exact &= r.rec.shape.obj(t) == wpaths(sig, &i, w)?.len();
            }
            rep.metric("rec_valid", r.valid);
            rep.metric("rec_square", r.square_holds);
            rep.metric("rec_counts_positions", counts_exact);
            rep.require(r.valid && r.square_holds && counts_exact, || json!({"rec": [r.valid, r.square_holds, counts_exact]}));
        }
    }
    if run("rule") {
        let rule = mu_rule(sig, &i, depth, limits)?;
        let r = rule.report()?;
        for (k, v) in r.to_json().as_object().cloned().unwrap_or_default() {
            if !["signature", "index", "depth"].contains(&k.as_str()) {
                rep.metrics.insert(format!("rule_{k}"), v);
            }
        }
        rep.require(r.passed(), || r.to_json());
    }
    Ok(rep)
}

pub fn derive(target: &str, index: &Option<String>, out: &Option<String>, opts: &Opts) -> Result<Report> {
    let (c, params, name) = if std::path::Path::new(target).exists() {
        let (c, star) = inputs::container(target, &opts.limits)?;
        let params: Vec<String> = c.indices.iter().filter(|i| Some(*i) != star.as_ref()).cloned().collect();
        let stem = std::path::Path::new(target).file_stem().map(|s| s.to_string_lossy().into_owned());
        (c, params, stem.unwrap_or_else(|| target.to_string()))
    } else {
        let sig = inputs::signature(target, &opts.limits)?;
        (sig.container.clone(), sig.params(), sig.name.clone())
    };
    let i = match index {
        Some(i) => i.clone(),
        None => params.first().cloned().context("no index to differentiate at")?,
    };
    let d = derivative(&c, &i)?.container;
    let mut rep = Report::new(format!("derive {name} at {i}"));
    rep.instances.push(name.clone());
    rep.metric("shapes", d.num_shapes());
    let mut positions = serde_json::Map::new();
    for (k, ix) in d.indices.iter().enumerate() {
        positions.insert(ix.clone(), json!(total_positions(&d, k)));
    }
    rep.metric("positions", Value::Object(positions));
    rep.metric("shape_list", json!((0..d.num_shapes()).map(|s| d.describe_shape(s)).collect::<Vec<_>>()));
    if let Some(path) = out {
        let text = match SignatureAst::from_container(&format!("d{name}"), &d, &params) {
            Some(ast) => ast.pretty(),
            None => write_container(&d),
        };
        fs::write(path, text).with_context(|| format!("writing {path}"))?;
        rep.lines.push(format!("  wrote {path}"));
    }
    Ok(rep)
}

pub fn zipper(sig: &Signature, tree: &str, path: &str, index: &Option<String>) -> Result<Report> {
    let i = match index {
        Some(i) => i.clone(),
        None => sig.params()[0].clone(),
    };
    let w = sig.parse_tree(tree)?;
    let p = WPath::parse(path)?;
    let z = decompose(sig, &i, &w, &p)?;
    let mut rep = Report::new("zipper");
    rep.instances.push(format!("{} {} {p}", sig.name, sig.render(&w)));
    let layers: Vec<String> = z
        .layers
        .iter()
        .map(|l| {
            let mut kids: Vec<String> = l.siblings.iter().map(|c| sig.render(c)).collect();
            kids.insert(l.hole, "_".into());
            format!("{}[{}]", sig.shape_name(l.shape), kids.join(", "))
        })
        .collect();
    for (k, l) in layers.iter().enumerate() {
        rep.lines.push(format!("  layer {k}: {l}"));
    }
    let hole = z.hole.as_ref().expect("decompose leaves a hole");
    rep.lines.push(format!("  focus: {} with hole at {i} position {}", sig.render(&z.focus), hole.position));
    let roundtrip = fill(sig, &z)? == (w.clone(), p.clone());
    let mut nav = ZipperValue::root(w.clone());
    for l in &z.layers {
        nav = down(sig, &nav, l.hole)?;
    }
    let reached = nav.focus == z.focus;
    while let Some(parent) = up(sig, &nav)? {
        nav = parent;
    }
    let navigation = reached && nav == ZipperValue::root(w);
    rep.metric("layers", json!(layers));
    rep.metric("focus", sig.render(&z.focus));
    rep.metric("hole", json!({"index": i, "position": hole.position}));
    rep.metric("plug_roundtrip", roundtrip);
    rep.metric("navigation_roundtrip", navigation);
    rep.require(roundtrip && navigation, || json!({"roundtrip": roundtrip, "navigation": navigation}));
    Ok(rep)
}

pub fn counterexample(name: &str, opts: &Opts) -> Result<Report> {
    match name {
        "bz2" => counterexample_report("counterexample bz2"),
        "twisted" => {
            let o = Opts { depth: Some(opts.depth.unwrap_or(3)), ..*opts };
            let mut rep = mu("counterexample twisted", &Signature::twisted(), &o, &None, "rule")?;
            let strong = rep.metrics.get("rule_strong") == Some(&json!(true));
            rep.require(!strong, || json!({"strong": strong}));
            Ok(rep)
        }
        other => bail!("unknown counterexample `{other}` (known: bz2, twisted)"),
    }
}
