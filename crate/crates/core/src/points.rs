//! Isolated points, point removal and grafting.
//!
//! An object is isolated when every hom-set out of it has at most one
//! element. Removing a point removes its whole isomorphism class.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groupoid::{
    fun_groupoid, full_subgroupoid, product, sum, unit, FinGroupoid, GEquivReport, GFamily,
    GFunctor, Subgroupoid,
};
use crate::limits::Limits;

pub fn is_isolated(g: &FinGroupoid, a: usize) -> bool {
    g.aut_order(a) <= 1 && (0..g.num_objects()).all(|b| g.hom(a, b).len() <= 1)
}

pub fn is_isolated_named(g: &FinGroupoid, a: &str) -> Result<bool> {
    Ok(is_isolated(g, g.object_id(a)?))
}

/// Isolated objects of a groupoid.
#[derive(Debug, Clone)]
pub struct IsolatedSet {
    pub base: Arc<FinGroupoid>,
    pub members: Vec<usize>,
}

impl IsolatedSet {
    pub fn subgroupoid(&self) -> Subgroupoid {
        full_subgroupoid(&self.base, |a| self.members.binary_search(&a).is_ok())
    }

    /// All hom-sets of the full subgroupoid on the members have size ≤ 1.
    pub fn is_setlike(&self) -> bool {
        self.members
            .iter()
            .all(|&a| self.members.iter().all(|&b| self.base.hom(a, b).len() <= 1))
    }

    pub fn contains(&self, a: usize) -> bool {
        self.members.binary_search(&a).is_ok()
    }
}

pub fn isolated_subgroupoid(g: &Arc<FinGroupoid>) -> IsolatedSet {
    IsolatedSet {
        base: g.clone(),
        members: (0..g.num_objects()).filter(|&a| is_isolated(g, a)).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// A groupoid together with its decomposition as `left ⊕ right`.
#[derive(Debug, Clone)]
pub struct MarkedSum {
    pub left: Arc<FinGroupoid>,
    pub right: Arc<FinGroupoid>,
    pub sum: Arc<FinGroupoid>,
}

impl MarkedSum {
    pub fn of(left: FinGroupoid, right: FinGroupoid) -> Self {
        let s = sum(&left, &right);
        MarkedSum {
            left: Arc::new(left),
            right: Arc::new(right),
            sum: Arc::new(s),
        }
    }

    /// Checks that `sum` is laid out as `left` followed by `right`.
    pub fn new(left: Arc<FinGroupoid>, right: Arc<FinGroupoid>, total: Arc<FinGroupoid>) -> Result<Self> {
        let marked = MarkedSum {
            left,
            right,
            sum: total,
        };
        marked.check_marking()?;
        Ok(marked)
    }

    fn check_marking(&self) -> Result<()> {
        let (l, r, s) = (&*self.left, &*self.right, &*self.sum);
        let bad = |what: &str| Err(Error::Precondition(format!("sum marking inconsistent: {what}")));
        if s.num_objects() != l.num_objects() + r.num_objects()
            || s.num_morphisms() != l.num_morphisms() + r.num_morphisms()
        {
            return bad("sizes");
        }
        let (no, nm) = (l.num_objects(), l.num_morphisms());
        for f in 0..s.num_morphisms() {
            let (side, local) = if f < nm { (l, f) } else { (r, f - nm) };
            let off = if f < nm { 0 } else { no };
            if s.src(f) != side.src(local) + off || s.dst(f) != side.dst(local) + off {
                return bad("endpoints");
            }
            let moff = if f < nm { 0 } else { nm };
            if s.inverse(f) != side.inverse(local) + moff {
                return bad("inverse");
            }
            for &h in s.out(s.dst(f)) {
                if (h < nm) != (f < nm) {
                    return bad("composable across summands");
                }
                let k = s.compose(h, f);
                if k != side.compose(h - moff, local) + moff {
                    return bad("composition");
                }
            }
        }
        Ok(())
    }

    pub fn inject(&self, side: Side, a: usize) -> usize {
        match side {
            Side::Left => a,
            Side::Right => self.left.num_objects() + a,
        }
    }

    pub fn split(&self, a: usize) -> (Side, usize) {
        let n = self.left.num_objects();
        if a < n {
            (Side::Left, a)
        } else {
            (Side::Right, a - n)
        }
    }
}

/// Isolated points of `A ⊕ B` matched with those of `A` and `B`.
#[derive(Debug, Clone)]
pub struct SumSplit {
    /// `(object of the sum, side, object of the summand)`
    pub pairs: Vec<(usize, Side, usize)>,
    pub verified: bool,
}

pub fn isolated_sum_split(marked: &MarkedSum) -> Result<SumSplit> {
    marked.check_marking()?;
    let left_iso = isolated_subgroupoid(&marked.left);
    let right_iso = isolated_subgroupoid(&marked.right);
    let sum_iso = isolated_subgroupoid(&marked.sum);
    let pairs: Vec<(usize, Side, usize)> = sum_iso
        .members
        .iter()
        .map(|&x| {
            let (side, a) = marked.split(x);
            (x, side, a)
        })
        .collect();
    let forward_ok = pairs.iter().all(|&(_, side, a)| match side {
        Side::Left => left_iso.contains(a),
        Side::Right => right_iso.contains(a),
    });
    let backward: Vec<usize> = left_iso
        .members
        .iter()
        .map(|&a| marked.inject(Side::Left, a))
        .chain(right_iso.members.iter().map(|&b| marked.inject(Side::Right, b)))
        .collect();
    let backward_ok = backward.len() == pairs.len() && backward.iter().all(|&x| sum_iso.contains(x));
    Ok(SumSplit {
        pairs,
        verified: forward_ok && backward_ok,
    })
}

/// `A ∖ a0` as the full subgroupoid on objects not isomorphic to `a0`.
#[derive(Debug, Clone)]
pub struct RemovalResult {
    pub base: Arc<FinGroupoid>,
    pub removed: usize,
    pub result: Subgroupoid,
}

impl RemovalResult {
    pub fn groupoid(&self) -> &Arc<FinGroupoid> {
        &self.result.groupoid
    }

    pub fn inclusion(&self) -> GFunctor {
        self.result.inclusion(&self.base)
    }
}

pub fn remove_point(g: &Arc<FinGroupoid>, a0: usize) -> Result<RemovalResult> {
    if a0 >= g.num_objects() {
        return Err(Error::UnknownObject(format!("#{a0}")));
    }
    let result = full_subgroupoid(g, |b| g.hom(a0, b).is_empty());
    Ok(RemovalResult {
        base: g.clone(),
        removed: a0,
        result,
    })
}

/// The functor `(A ∖ a0) ⊕ 1 -> A` sending the extra point to `a0`, with its
/// equivalence report.
pub fn replace_functor(g: &Arc<FinGroupoid>, a0: usize) -> Result<(GFunctor, GEquivReport)> {
    let removal = remove_point(g, a0)?;
    let rest = removal.groupoid();
    let source = Arc::new(sum(rest, &unit()));
    let mut obj_map = removal.result.from_sub.clone();
    obj_map.push(a0);
    let mut mor_map = removal.result.mor_from_sub.clone();
    mor_map.push(g.identity(a0));
    let f = GFunctor::new(source, g.clone(), obj_map, mor_map)?;
    let report = f.equivalence_report();
    Ok((f, report))
}

/// The canonical functor `(A ⊕ B) ∖ x -> (A ∖ a0) ⊕ B` (or the mirrored one)
/// where `x` is the injection of `point` on `side`.
pub fn sum_remove(marked: &MarkedSum, side: Side, point: usize) -> Result<(GFunctor, GEquivReport)> {
    marked.check_marking()?;
    let summand = match side {
        Side::Left => &marked.left,
        Side::Right => &marked.right,
    };
    if point >= summand.num_objects() {
        return Err(Error::Precondition("point not on the indicated side".into()));
    }
    let whole = remove_point(&marked.sum, marked.inject(side, point))?;
    let part = remove_point(summand, point)?;
    let (l, r): (Arc<FinGroupoid>, Arc<FinGroupoid>) = match side {
        Side::Left => (part.groupoid().clone(), marked.right.clone()),
        Side::Right => (marked.left.clone(), part.groupoid().clone()),
    };
    let target = Arc::new(sum(&l, &r));
    let (nl, ml) = (l.num_objects(), l.num_morphisms());
    let mlo = marked.left.num_morphisms();
    let obj_map = whole
        .result
        .from_sub
        .iter()
        .map(|&x| {
            let (s, a) = marked.split(x);
            match (s, side) {
                (Side::Left, Side::Left) => part.result.to_sub[a].expect("kept"),
                (Side::Left, Side::Right) => a,
                (Side::Right, Side::Left) => nl + a,
                (Side::Right, Side::Right) => nl + part.result.to_sub[a].expect("kept"),
            }
        })
        .collect();
    let mor_map = whole
        .result
        .mor_from_sub
        .iter()
        .map(|&f| {
            let on_left = f < mlo;
            match (on_left, side) {
                (true, Side::Left) => part.result.mor_to_sub[f].expect("kept"),
                (true, Side::Right) => f,
                (false, Side::Left) => ml + (f - mlo),
                (false, Side::Right) => ml + part.result.mor_to_sub[f - mlo].expect("kept"),
            }
        })
        .collect();
    let f = GFunctor::new(whole.groupoid().clone(), target, obj_map, mor_map)?;
    let report = f.equivalence_report();
    Ok((f, report))
}

/// Validated Grothendieck construction of a family.
pub fn sigma_groupoid(fam: &GFamily) -> Result<Arc<FinGroupoid>> {
    fam.validate().into_result(Error::InvalidFamily)?;
    Ok(fam.sigma().groupoid)
}

/// The canonical map from pairs of isolated points into the isolated points
/// of the total groupoid.
#[derive(Debug, Clone)]
pub struct SigmaIsolateReport {
    /// `((a, b), image in Σ)` for every isolated `a` and isolated `b` over it.
    pub map: Vec<((usize, usize), usize)>,
    pub isolated_total: Vec<usize>,
    pub domain_components: usize,
    pub codomain_components: usize,
    /// Every image is isolated.
    pub total: bool,
    pub injective: bool,
    pub surjective: bool,
}

impl SigmaIsolateReport {
    pub fn domain_size(&self) -> usize {
        self.map.len()
    }

    pub fn codomain_size(&self) -> usize {
        self.isolated_total.len()
    }
}

pub fn sigma_isolate(fam: &GFamily) -> Result<SigmaIsolateReport> {
    fam.validate().into_result(Error::InvalidFamily)?;
    let sig = fam.sigma();
    Ok(sigma_isolate_on(fam, &sig))
}

/// [`sigma_isolate`] for an already built, trusted family.
pub fn sigma_isolate_on(fam: &GFamily, sig: &crate::groupoid::Sigma) -> SigmaIsolateReport {
    let base = &*fam.base;
    let total = &*sig.groupoid;
    let mut map = Vec::new();
    for a in 0..base.num_objects() {
        if !is_isolated(base, a) {
            continue;
        }
        let fib = &fam.fibers[a];
        for b in 0..fib.num_objects() {
            if is_isolated(fib, b) {
                map.push(((a, b), sig.obj(a, b)));
            }
        }
    }
    let isolated_total: Vec<usize> = (0..total.num_objects())
        .filter(|&x| is_isolated(total, x))
        .collect();
    let labels = total.component_labels();
    let all_images_isolated = map.iter().all(|&(_, x)| isolated_total.binary_search(&x).is_ok());
    let mut image_comps: Vec<usize> = map.iter().map(|&(_, x)| labels[x]).collect();
    image_comps.sort_unstable();
    image_comps.dedup();
    let mut iso_comps: Vec<usize> = isolated_total.iter().map(|&x| labels[x]).collect();
    iso_comps.sort_unstable();
    iso_comps.dedup();
    let domain_components = count_domain_components(fam, &map);
    SigmaIsolateReport {
        injective: all_images_isolated && domain_components == image_comps.len(),
        surjective: image_comps.len() == iso_comps.len(),
        total: all_images_isolated,
        codomain_components: iso_comps.len(),
        domain_components,
        map,
        isolated_total,
    }
}

/// Components of `Σ_{a isolated} Isolated(B a)` computed from the base and
/// fiber groupoids directly.
fn count_domain_components(fam: &GFamily, map: &[((usize, usize), usize)]) -> usize {
    let base = &*fam.base;
    let mut reps: Vec<(usize, usize)> = Vec::new();
    for &((a, b), _) in map {
        let seen = reps.iter().any(|&(a2, b2)| {
            base.hom(a, a2)
                .iter()
                .any(|&f| fam.fibers[a2].isomorphic(fam.transport_obj(f, b), b2))
        });
        if !seen {
            reps.push((a, b));
        }
    }
    reps.len()
}

/// `a ↦ hom(a0, a)` as a discrete family, transported by postcomposition.
pub fn singleton_family(g: &Arc<FinGroupoid>, a0: usize) -> GFamily {
    let homs: Vec<Vec<usize>> = (0..g.num_objects()).map(|a| g.hom(a0, a).to_vec()).collect();
    let sizes: Vec<usize> = homs.iter().map(Vec::len).collect();
    let gg = g.clone();
    GFamily::discrete(
        g.clone(),
        |a| sizes[a],
        move |f| {
            let (a, b) = (gg.src(f), gg.dst(f));
            homs[a]
                .iter()
                .map(|&p| {
                    let q = gg.compose(f, p);
                    homs[b].iter().position(|&x| x == q).expect("hom closed")
                })
                .collect()
        },
    )
}

/// Σ of the singleton family is equivalent to a point.
pub fn singleton_contractible(g: &Arc<FinGroupoid>, a0: usize) -> bool {
    let sig = singleton_family(g, a0).sigma();
    let t = &*sig.groupoid;
    t.num_components() == 1 && (0..t.num_objects()).all(|x| t.aut_order(x) == 1)
}

/// The functor `(Σ_{a ∈ A∖a0} B a) ⊕ (B(a0) ∖ b0) -> (Σ B) ∖ (a0, b0)`.
pub fn sigma_remove(fam: &GFamily, a0: usize, b0: usize) -> Result<(GFunctor, GEquivReport)> {
    let base = &fam.base;
    if a0 >= base.num_objects() || b0 >= fam.fibers[a0].num_objects() {
        return Err(Error::UnknownObject(format!("({a0},{b0})")));
    }
    if base.aut_order(a0) != 1 {
        return Err(Error::Precondition(format!(
            "{} has nontrivial automorphisms",
            base.object_name(a0)
        )));
    }
    let sig = fam.sigma();
    let whole = remove_point(&sig.groupoid, sig.obj(a0, b0))?;
    let rest = remove_point(base, a0)?;
    let restricted = fam.pullback(&rest.inclusion());
    let rest_sig = restricted.sigma();
    let fiber_rest = remove_point(&fam.fibers[a0], b0)?;
    let source = Arc::new(sum(&rest_sig.groupoid, fiber_rest.groupoid()));
    let n_left = rest_sig.groupoid.num_objects();
    let m_left = rest_sig.groupoid.num_morphisms();
    let to_whole_obj = |x: usize| {
        whole.result.to_sub[x].ok_or_else(|| Error::Precondition("image hits the removed class".into()))
    };
    let to_whole_mor = |x: usize| {
        whole.result.mor_to_sub[x].ok_or_else(|| Error::Precondition("image hits the removed class".into()))
    };
    let mut obj_map = Vec::with_capacity(source.num_objects());
    for o in 0..source.num_objects() {
        let x = if o < n_left {
            let (a, b) = rest_sig.obj_coords(o);
            sig.obj(rest.result.from_sub[a], b)
        } else {
            sig.obj(a0, fiber_rest.result.from_sub[o - n_left])
        };
        obj_map.push(to_whole_obj(x)?);
    }
    let mut mor_map = Vec::with_capacity(source.num_morphisms());
    for m in 0..source.num_morphisms() {
        let x = if m < m_left {
            let (f, phi) = rest_sig.mor_coords(m);
            sig.mor(rest.result.mor_from_sub[f], phi)
        } else {
            sig.mor(base.identity(a0), fiber_rest.result.mor_from_sub[m - m_left])
        };
        mor_map.push(to_whole_mor(x)?);
    }
    let f = GFunctor::new(source, whole.groupoid().clone(), obj_map, mor_map)?;
    let report = f.equivalence_report();
    Ok((f, report))
}

/// Extends `f : A ∖ a0 -> B` to `A`, sending the class of `a0` to `b0` and
/// every morphism inside it to the identity of `b0`.
pub fn graft(a: &Arc<FinGroupoid>, a0: usize, f: &GFunctor, b0: usize) -> Result<GFunctor> {
    if a0 >= a.num_objects() {
        return Err(Error::UnknownObject(format!("#{a0}")));
    }
    if !is_isolated(a, a0) {
        return Err(Error::NotIsolated(a.object_name(a0).to_string()));
    }
    let removal = remove_point(a, a0)?;
    if **removal.groupoid() != *f.source {
        return Err(Error::InvalidFunctor("source is not A with the point removed".into()));
    }
    let b = &f.target;
    if b0 >= b.num_objects() {
        return Err(Error::UnknownObject(format!("#{b0}")));
    }
    let obj_map = (0..a.num_objects())
        .map(|x| match removal.result.to_sub[x] {
            Some(y) => f.obj(y),
            None => b0,
        })
        .collect();
    let mor_map = (0..a.num_morphisms())
        .map(|m| match removal.result.mor_to_sub[m] {
            Some(y) => f.mor(y),
            None => b.identity(b0),
        })
        .collect();
    GFunctor::new(a.clone(), b.clone(), obj_map, mor_map)
}

/// Restriction to `A ∖ a0` together with the value at `a0`.
pub fn ungraft(g: &GFunctor, a0: usize) -> Result<(GFunctor, usize)> {
    let removal = remove_point(&g.source, a0)?;
    let inc = removal.inclusion();
    Ok((g.after(&inc), g.obj(a0)))
}

#[derive(Debug, Clone)]
pub struct GraftEquivReport {
    /// Functors `A ∖ a0 -> B`.
    pub removed_functors: usize,
    pub target_objects: usize,
    pub target_components: usize,
    /// Functors `A -> B`.
    pub functors: usize,
    pub removed_components: usize,
    pub functor_components: usize,
    /// Groupoid cardinalities (sum of `1/|Aut|` over components).
    pub domain_cardinality: f64,
    pub codomain_cardinality: f64,
    pub computation_rules: bool,
    pub faithful: bool,
    pub full: bool,
    pub essentially_surjective: bool,
}

impl GraftEquivReport {
    pub fn is_equivalence(&self) -> bool {
        self.faithful && self.full && self.essentially_surjective
    }
}

fn groupoid_cardinality(g: &FinGroupoid) -> f64 {
    g.components()
        .iter()
        .map(|c| 1.0 / g.aut_order(c[0]) as f64)
        .sum()
}

/// Builds the comparison functor `Fun(A∖a0, B) × B -> Fun(A, B)` by grafting
/// and decides whether it is an equivalence.
pub fn graft_equiv_check(
    a: &Arc<FinGroupoid>,
    a0: usize,
    b: &Arc<FinGroupoid>,
    limits: &Limits,
) -> Result<GraftEquivReport> {
    if !is_isolated(a, a0) {
        return Err(Error::NotIsolated(a.object_name(a0).to_string()));
    }
    let removal = remove_point(a, a0)?;
    let rest = removal.groupoid().clone();
    let fun_rest = fun_groupoid(&rest, b, limits)?;
    let fun_all = fun_groupoid(a, b, limits)?;
    let domain = Arc::new(product(&fun_rest.groupoid, b));
    let nb = b.num_objects();
    let mb = b.num_morphisms();
    let mut computation_rules = true;
    let mut obj_map = Vec::with_capacity(domain.num_objects());
    for x in 0..domain.num_objects() {
        let (fi, b0) = (x / nb, x % nb);
        let f = &fun_rest.functors[fi];
        let g = graft(a, a0, f, b0)?;
        let (back, v) = ungraft(&g, a0)?;
        computation_rules &= v == b0 && back.same_tables(f);
        let idx = fun_all
            .functor_index(&g.obj_map, &g.mor_map)
            .ok_or_else(|| Error::InvalidFunctor("graft produced an unknown functor".into()))?;
        obj_map.push(idx);
    }
    let mut mor_map = Vec::with_capacity(domain.num_morphisms());
    for m in 0..domain.num_morphisms() {
        let (ti, beta) = (m / mb, m % mb);
        let (from, to, comps) = &fun_rest.transformations[ti];
        let from_obj = obj_map[from * nb + b.src(beta)];
        let to_obj = obj_map[to * nb + b.dst(beta)];
        let components: Vec<usize> = (0..a.num_objects())
            .map(|x| match removal.result.to_sub[x] {
                Some(y) => comps[y],
                None => beta,
            })
            .collect();
        let idx = fun_all
            .transformation_index(from_obj, to_obj, &components)
            .ok_or_else(|| Error::InvalidFunctor("grafted transformation is not natural".into()))?;
        mor_map.push(idx);
    }
    let comparison = GFunctor::new(domain.clone(), fun_all.groupoid.clone(), obj_map, mor_map)?;
    let report = comparison.equivalence_report();
    Ok(GraftEquivReport {
        removed_functors: fun_rest.functors.len(),
        target_objects: nb,
        target_components: b.num_components(),
        functors: fun_all.functors.len(),
        removed_components: fun_rest.groupoid.num_components(),
        functor_components: fun_all.groupoid.num_components(),
        domain_cardinality: groupoid_cardinality(&domain),
        codomain_cardinality: groupoid_cardinality(&fun_all.groupoid),
        computation_rules,
        faithful: report.faithful,
        full: report.full,
        essentially_surjective: report.essentially_surjective,
    })
}
