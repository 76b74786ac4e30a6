use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;

use super::{in_out, mu_container, MuContainer, Signature, WTree};
use crate::container::{morphism_eq, same_container, subst, subst_map, tables, CartMorphism, Container, SubstShape};
use crate::error::{Error, Result};
use crate::groupoid::{disc_named, full_subgroupoid, GFamily, GFunctor, Subgroupoid};
use crate::limits::Limits;

/// An algebra `α : F[G|bound] ⊸ G` whose structure map only needs the first
/// `bound` shapes of its carrier `G`.
#[derive(Debug, Clone)]
pub struct Algebra {
    pub carrier: Arc<Container>,
    pub bound: usize,
    /// `G|bound`
    pub domain: Arc<Container>,
    pub assemblies: SubstShape,
    pub map: CartMorphism,
    sub: Subgroupoid,
}

/// The full subcontainer on the first `bound` shapes.
fn prefix(c: &Container, bound: usize) -> (Container, Subgroupoid) {
    let sub = full_subgroupoid(&c.shapes, |s| s < bound);
    let positions = c
        .positions
        .iter()
        .map(|fam| GFamily {
            base: sub.groupoid.clone(),
            fibers: sub.from_sub.iter().map(|&s| fam.fibers[s].clone()).collect(),
            transport: sub.mor_from_sub.iter().map(|&m| fam.transport[m].clone()).collect(),
        })
        .collect();
    let out = Container {
        indices: c.indices.clone(),
        shapes: sub.groupoid.clone(),
        positions,
    };
    (out, sub)
}

impl Algebra {
    /// Builds `α` from the shapes of `F[G|bound]`.
    pub fn new(
        sig: &Signature,
        carrier: Arc<Container>,
        bound: usize,
        limits: &Limits,
        build: impl FnOnce(&SubstShape, &Arc<Container>) -> Result<CartMorphism>,
    ) -> Result<Self> {
        if carrier.indices != sig.params() {
            return Err(Error::IndexMismatch(format!(
                "carrier indices {:?}, signature parameters {:?}",
                carrier.indices,
                sig.params()
            )));
        }
        if bound > carrier.num_shapes() {
            return Err(Error::Precondition("bound exceeds the carrier".into()));
        }
        let (domain, sub) = prefix(&carrier, bound);
        let assemblies = subst(&sig.container, &sig.star, &domain, limits)?;
        let map = build(&assemblies, &carrier)?;
        if !same_container(&map.source, &assemblies.container) || !same_container(&map.target, &carrier) {
            return Err(Error::InvalidMorphism("structure map has the wrong endpoints".into()));
        }
        map.validate().into_result(Error::InvalidMorphism)?;
        Ok(Algebra {
            carrier,
            bound,
            domain: Arc::new(domain),
            assemblies,
            map,
            sub,
        })
    }

    /// `m` with its target cut down to `G|bound`.
    fn restrict_target(&self, m: &CartMorphism) -> Result<CartMorphism> {
        let obj_map = m
            .shape
            .obj_map
            .iter()
            .map(|&t| self.sub.to_sub[t].ok_or(Error::DepthExceeded(self.bound)))
            .collect::<Result<Vec<_>>>()?;
        let mor_map = m
            .shape
            .mor_map
            .iter()
            .map(|&t| self.sub.mor_to_sub[t].ok_or(Error::DepthExceeded(self.bound)))
            .collect::<Result<Vec<_>>>()?;
        let shape = GFunctor::new_unchecked(m.source.shapes.clone(), self.domain.shapes.clone(), obj_map, mor_map);
        let pos = m
            .pos
            .iter()
            .enumerate()
            .map(|(j, row)| {
                row.iter()
                    .enumerate()
                    .map(|(s, u)| {
                        GFunctor::new_unchecked(
                            self.domain.fiber(j, shape.obj(s)).clone(),
                            u.target.clone(),
                            u.obj_map.clone(),
                            u.mor_map.clone(),
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(CartMorphism {
            source: m.source.clone(),
            target: self.domain.clone(),
            shape,
            pos,
        })
    }
}

/// `In : F[μF|_{d-1}] ⊸ μF|_d` as an algebra on `μF|_d`.
pub fn initial_algebra(sig: &Signature, depth: usize, limits: &Limits) -> Result<Algebra> {
    let io = in_out(sig, depth, limits)?;
    let bound = io.lower.num_trees();
    Algebra::new(sig, io.upper.container.clone(), bound, limits, |_, _| Ok(io.in_map.clone()))
}

/// Counts parameter positions: carrier shapes `0..=n` with `n` discrete
/// positions at the single parameter, `α(s, k⃗) = |P(s)| + Σ k⃗`.
pub fn count_algebra(sig: &Signature, bound: usize, limits: &Limits) -> Result<Algebra> {
    sig.require_discrete()?;
    if sig.params().len() != 1 {
        return Err(Error::Unsupported("the counting algebra needs one parameter".into()));
    }
    let top = (0..sig.num_shapes())
        .map(|s| sig.positions(0, s) + sig.arity(s) * bound.saturating_sub(1))
        .max()
        .unwrap_or(0);
    let shapes = Arc::new(disc_named((0..=top).map(|n| n.to_string()).collect()));
    let fam = GFamily::discrete(shapes.clone(), |n| n, |m| (0..shapes.src(m)).collect());
    let carrier = Arc::new(Container::new(sig.params(), shapes, vec![fam])?);
    Algebra::new(sig, carrier, bound, limits, |asm, carrier| {
        let src = Arc::new(asm.container.clone());
        let obj_map: Vec<usize> = (0..src.num_shapes())
            .map(|o| {
                let (s, h) = asm.shape_coords(o);
                sig.positions(0, s) + h.obj_map.iter().sum::<usize>()
            })
            .collect();
        let mor_map = (0..src.shapes.num_morphisms())
            .map(|m| carrier.shapes.identity(obj_map[src.shapes.src(m)]))
            .collect();
        let shape = GFunctor::new_unchecked(src.shapes.clone(), carrier.shapes.clone(), obj_map, mor_map);
        let pos = vec![(0..src.num_shapes())
            .map(|o| tables(carrier.fiber(0, shape.obj(o)), src.fiber(0, o), |x| x, |x| x))
            .collect()];
        Ok(CartMorphism {
            source: src,
            target: carrier.clone(),
            shape,
            pos,
        })
    })
}

/// `μF|_d` with its trees reordered by `perm` (tree `t` becomes shape
/// `perm[t]`), and `α = perm ∘ In ∘ F[perm⁻¹]`. `perm` must map the trees of
/// depth below `d` onto an initial segment.
pub fn relabel_algebra(sig: &Signature, depth: usize, perm: &[usize], limits: &Limits) -> Result<(Algebra, CartMorphism)> {
    let io = in_out(sig, depth, limits)?;
    let mu = &io.upper;
    let n = mu.num_trees();
    let mut inv = vec![usize::MAX; n];
    for (t, &p) in perm.iter().enumerate() {
        if p >= n || inv[p] != usize::MAX {
            return Err(Error::Precondition("not a permutation of the trees".into()));
        }
        inv[p] = t;
    }
    if perm.len() != n {
        return Err(Error::Precondition("not a permutation of the trees".into()));
    }
    let bound = io.lower.num_trees();
    if (0..bound).any(|t| perm[t] >= bound) {
        return Err(Error::Precondition("the permutation mixes depths".into()));
    }
    let names = (0..n).map(|k| mu.container.shapes.object_name(inv[k]).to_string()).collect();
    let shapes = Arc::new(disc_named(names));
    let positions = mu
        .paths
        .iter()
        .map(|per| GFamily::discrete(shapes.clone(), |k| per[inv[k]].len(), |m| (0..per[inv[shapes.src(m)]].len()).collect()))
        .collect();
    let carrier = Arc::new(Container::new(sig.params(), shapes, positions)?);
    let relabel = {
        let src = mu.container.clone();
        let shape = GFunctor::new_unchecked(
            src.shapes.clone(),
            carrier.shapes.clone(),
            perm.to_vec(),
            (0..n).map(|m| carrier.shapes.identity(perm[src.shapes.src(m)])).collect(),
        );
        let pos = (0..src.indices.len())
            .map(|j| {
                (0..n)
                    .map(|t| tables(carrier.fiber(j, perm[t]), src.fiber(j, t), |x| x, |x| x))
                    .collect()
            })
            .collect();
        CartMorphism {
            source: src,
            target: carrier.clone(),
            shape,
            pos,
        }
    };
    let alg = Algebra::new(sig, carrier.clone(), bound, limits, |asm, carrier| {
        let src = Arc::new(asm.container.clone());
        let obj_map: Vec<usize> = (0..src.num_shapes())
            .map(|o| {
                let (s, h) = asm.shape_coords(o);
                let w = WTree::new(s, h.obj_map.iter().map(|&k| mu.trees[inv[k]].clone()).collect());
                mu.tree_index(&w).map(|t| perm[t]).ok_or(Error::DepthExceeded(depth))
            })
            .collect::<Result<_>>()?;
        let mor_map = (0..src.shapes.num_morphisms())
            .map(|m| carrier.shapes.identity(obj_map[src.shapes.src(m)]))
            .collect();
        let shape = GFunctor::new_unchecked(src.shapes.clone(), carrier.shapes.clone(), obj_map, mor_map);
        let pos = (0..src.indices.len())
            .map(|j| {
                (0..src.num_shapes())
                    .map(|o| tables(carrier.fiber(j, shape.obj(o)), src.fiber(j, o), |x| x, |x| x))
                    .collect()
            })
            .collect();
        Ok(CartMorphism {
            source: src,
            target: carrier.clone(),
            shape,
            pos,
        })
    })?;
    Ok((alg, relabel))
}

/// `Rec(α) : μF|_d ⊸ G` by structural recursion.
fn build_rec(sig: &Signature, alg: &Algebra, mu: &MuContainer) -> Result<CartMorphism> {
    let n = mu.num_trees();
    let nj = mu.paths.len();
    let dom_shapes = &alg.domain.shapes;
    let mut shape_of: Vec<usize> = Vec::with_capacity(n);
    let mut assembly = Vec::with_capacity(n);
    // u[j][t] : positions of G at Rec(t) -> paths of t
    let mut u: Vec<Vec<Vec<usize>>> = vec![Vec::with_capacity(n); nj];
    for (t, w) in mu.trees.iter().enumerate() {
        let kids: Vec<usize> = w
            .children
            .iter()
            .map(|c| mu.tree_index(c).expect("children are enumerated first"))
            .collect();
        let recs = kids
            .iter()
            .map(|&k| alg.sub.to_sub[shape_of[k]].ok_or(Error::DepthExceeded(mu.depth)))
            .collect::<Result<Vec<usize>>>()?;
        let ids: Vec<usize> = recs.iter().map(|&r| dom_shapes.identity(r)).collect();
        let o = alg
            .assemblies
            .shape_index(w.shape, &recs, &ids)
            .expect("assembly of a well-formed tree");
        shape_of.push(alg.map.shape.obj(o));
        assembly.push(o);
        for (j, uj) in u.iter_mut().enumerate() {
            let ng = alg.carrier.fiber(j, shape_of[t]).num_objects();
            let top = sig.positions(j, w.shape);
            let sig_o = &alg.assemblies.inner[j][o];
            let mut offsets = Vec::with_capacity(kids.len());
            let mut acc = top;
            for &k in &kids {
                offsets.push(acc);
                acc += mu.paths[j][k].len();
            }
            let table = (0..ng)
                .map(|a| {
                    let b = alg.map.pos[j][o].obj(a);
                    if b < top {
                        b
                    } else {
                        let (p, q) = sig_o.obj_coords(b - top);
                        offsets[p] + uj[kids[p]][q]
                    }
                })
                .collect();
            uj.push(table);
        }
    }
    let src = mu.container.clone();
    let tgt = alg.carrier.clone();
    let shape = GFunctor::new_unchecked(
        src.shapes.clone(),
        tgt.shapes.clone(),
        shape_of.clone(),
        (0..src.shapes.num_morphisms())
            .map(|m| tgt.shapes.identity(shape_of[src.shapes.src(m)]))
            .collect(),
    );
    let pos = (0..nj)
        .map(|j| {
            (0..n)
                .map(|t| {
                    let (gf, mf) = (tgt.fiber(j, shape_of[t]), src.fiber(j, t));
                    let table = &u[j][t];
                    tables(gf, mf, |a| table[a], |m| mf.identity(table[gf.src(m)]))
                })
                .collect()
        })
        .collect();
    Ok(CartMorphism {
        source: src,
        target: tgt,
        shape,
        pos,
    })
}

#[derive(Debug, Clone)]
pub struct RecReport {
    pub rec: CartMorphism,
    pub valid: bool,
    /// `Rec ∘ In = α ∘ F[Rec]` on `F[μF|_{d-1}]`.
    pub square_holds: bool,
}

/// `m` restricted to the first `source.num_shapes()` shapes of its
/// discrete source.
pub fn restrict_source(m: &CartMorphism, source: &Arc<Container>) -> Result<CartMorphism> {
    let n = source.num_shapes();
    if !m.source.shapes.is_discrete() || n > m.source.num_shapes() {
        return Err(Error::Unsupported("restriction to a prefix of discrete shapes".into()));
    }
    let shape = GFunctor::new_unchecked(
        source.shapes.clone(),
        m.target.shapes.clone(),
        m.shape.obj_map[..n].to_vec(),
        m.shape.mor_map[..n].to_vec(),
    );
    let pos = m
        .pos
        .iter()
        .enumerate()
        .map(|(j, row)| {
            row[..n]
                .iter()
                .enumerate()
                .map(|(s, u)| {
                    GFunctor::new_unchecked(u.source.clone(), source.fiber(j, s).clone(), u.obj_map.clone(), u.mor_map.clone())
                })
                .collect()
        })
        .collect();
    Ok(CartMorphism {
        source: source.clone(),
        target: m.target.clone(),
        shape,
        pos,
    })
}

/// Whether `m : μF|_d ⊸ G` commutes with the structure maps.
fn square(sig: &Signature, alg: &Algebra, m: &CartMorphism, depth: usize, limits: &Limits) -> Result<bool> {
    if depth == 0 {
        return Ok(true);
    }
    let io = in_out(sig, depth, limits)?;
    let lower = match restrict_source(m, &io.lower.container).and_then(|r| alg.restrict_target(&r)) {
        Ok(r) => r,
        Err(Error::DepthExceeded(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let lifted = subst_map(&sig.container, &io.assemblies, &alg.assemblies, &lower)?;
    let lhs = m.after(&io.in_map)?;
    let rhs = alg.map.after(&lifted)?;
    Ok(morphism_eq(&lhs, &rhs).is_some())
}

pub fn rec(sig: &Signature, alg: &Algebra, depth: usize, limits: &Limits) -> Result<RecReport> {
    sig.require_discrete()?;
    let mu = mu_container(sig, depth, limits)?;
    let r = build_rec(sig, alg, &mu)?;
    let valid = r.validate().is_valid();
    let square_holds = square(sig, alg, &r, depth, limits)?;
    Ok(RecReport {
        rec: r,
        valid,
        square_holds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AgreementReport {
    pub is_algebra_morphism: bool,
    pub agrees: bool,
}

/// Checks the algebra square for `candidate`, then compares it with `Rec(α)`.
pub fn algebra_morphism_agrees(
    sig: &Signature,
    alg: &Algebra,
    candidate: &CartMorphism,
    depth: usize,
    limits: &Limits,
) -> Result<AgreementReport> {
    let r = rec(sig, alg, depth, limits)?;
    if !same_container(&candidate.source, &r.rec.source) || !same_container(&candidate.target, &r.rec.target) {
        return Err(Error::InvalidMorphism("candidate has the wrong endpoints".into()));
    }
    let is_algebra_morphism = candidate.validate().is_valid() && square(sig, alg, candidate, depth, limits)?;
    let agrees = is_algebra_morphism && morphism_eq(candidate, &r.rec).is_some();
    Ok(AgreementReport {
        is_algebra_morphism,
        agrees,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WRecReport {
    /// `h` is injective where defined.
    pub precondition: bool,
    pub domain_checked: usize,
    pub trees: usize,
    /// `W-rec` is defined on every tree.
    pub defined: bool,
    pub injective: bool,
}

impl WRecReport {
    pub fn passed(&self) -> bool {
        self.precondition && self.defined && self.injective
    }
}

/// `W-rec(h)` on trees of depth at most `d`, for a partial
/// `h : Σ_s (P⋆(s) → X) → X` on `X = {0, …, x_size-1}`; values outside `X`
/// count as undefined.
pub fn wrec_embedding_check(
    sig: &Signature,
    x_size: usize,
    h: impl Fn(usize, &[usize]) -> Option<usize>,
    depth: usize,
    limits: &Limits,
) -> Result<WRecReport> {
    sig.require_discrete()?;
    let mut domain = 0usize;
    for s in 0..sig.num_shapes() {
        domain = domain.saturating_add(x_size.saturating_pow(sig.arity(s) as u32));
    }
    limits.check_cells("W-rec domain", domain)?;
    let mut seen = HashSet::new();
    let mut precondition = true;
    for s in 0..sig.num_shapes() {
        let n = sig.arity(s);
        let mut args = vec![0usize; n];
        'args: loop {
            if let Some(v) = h(s, &args).filter(|&v| v < x_size) {
                if !seen.insert(v) {
                    precondition = false;
                }
            }
            let mut pos = n;
            loop {
                if pos == 0 || x_size == 0 {
                    break 'args;
                }
                pos -= 1;
                args[pos] += 1;
                if args[pos] < x_size {
                    continue 'args;
                }
                args[pos] = 0;
            }
        }
    }
    let trees = super::enumerate_wtrees(sig, depth, limits)?;
    let mut values = std::collections::HashMap::new();
    let mut defined = true;
    for w in &trees {
        let kids: Option<Vec<usize>> = w.children.iter().map(|c| values.get(c).copied().flatten()).collect();
        let v = kids.and_then(|k| h(w.shape, &k)).filter(|&v| v < x_size);
        defined &= v.is_some();
        values.insert(w.clone(), v);
    }
    let image: HashSet<usize> = values.values().flatten().copied().collect();
    Ok(WRecReport {
        precondition,
        domain_checked: domain,
        trees: trees.len(),
        defined,
        injective: defined && image.len() == trees.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixpoint::{wpaths, WPath};

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn rec_of_in_is_identity() {
        for sig in [Signature::list(2), Signature::binary_tree()] {
            for d in 1..=3 {
                let alg = initial_algebra(&sig, d, &lim()).unwrap();
                let r = rec(&sig, &alg, d, &lim()).unwrap();
                assert!(r.valid && r.square_holds);
                let id = CartMorphism::identity(r.rec.source.clone());
                assert!(morphism_eq(&r.rec, &id).is_some());
            }
        }
    }

    #[test]
    fn length_rec() {
        let sig = Signature::list(1);
        let d = 4;
        let alg = count_algebra(&sig, d, &lim()).unwrap();
        assert_eq!(alg.carrier.num_shapes(), d + 1);
        let r = rec(&sig, &alg, d, &lim()).unwrap();
        assert!(r.valid && r.square_holds);
        let mu = mu_container(&sig, d, &lim()).unwrap();
        let w = sig.parse_tree("cons[cons[nil]]").unwrap();
        let t = mu.tree_index(&w).unwrap();
        assert_eq!(r.rec.shape.obj(t), 2);
        let u = &r.rec.pos[0][t];
        assert_eq!(u.source.num_objects(), 2);
        assert_eq!(u.obj_map, vec![0, 1]);
    }

    /// Length computed by walking the list, with position `k` sent to the
    /// `k`-th element.
    fn hand_length(sig: &Signature, alg: &Algebra, d: usize) -> CartMorphism {
        let mu = mu_container(sig, d, &lim()).unwrap();
        let len = |w: &WTree| {
            let mut n = 0;
            let mut w = w;
            while let Some(c) = w.children.first() {
                n += 1;
                w = c;
            }
            n
        };
        let src = mu.container.clone();
        let tgt = alg.carrier.clone();
        let obj: Vec<usize> = mu.trees.iter().map(len).collect();
        let shape = GFunctor::new_unchecked(
            src.shapes.clone(),
            tgt.shapes.clone(),
            obj.clone(),
            (0..mu.num_trees()).map(|t| tgt.shapes.identity(obj[t])).collect(),
        );
        let pos = vec![(0..mu.num_trees())
            .map(|t| {
                let ps = wpaths(sig, "x", &mu.trees[t]).unwrap();
                let gf = tgt.fiber(0, obj[t]);
                let table: Vec<usize> = (0..obj[t])
                    .map(|k| ps.iter().position(|p| *p == WPath::from_steps(&vec![0; k], 0)).unwrap())
                    .collect();
                tables(gf, src.fiber(0, t), |a| table[a], |m| table[gf.src(m)])
            })
            .collect()];
        CartMorphism {
            source: src,
            target: tgt,
            shape,
            pos,
        }
    }

    #[test]
    fn hand_written_length_agrees() {
        let sig = Signature::list(1);
        let d = 4;
        let alg = count_algebra(&sig, d, &lim()).unwrap();
        let m = hand_length(&sig, &alg, d);
        let rep = algebra_morphism_agrees(&sig, &alg, &m, d, &lim()).unwrap();
        assert!(rep.is_algebra_morphism && rep.agrees);
        let mut bad = m.clone();
        bad.shape.obj_map[2] = 0;
        let rep = algebra_morphism_agrees(&sig, &alg, &bad, d, &lim()).unwrap();
        assert!(!rep.is_algebra_morphism);
    }

    #[test]
    fn rec_into_relabelled_copy() {
        let sig = Signature::list(2);
        let d = 3;
        let mu = mu_container(&sig, d, &lim()).unwrap();
        let n = mu.num_trees();
        let bound = mu_container(&sig, d - 1, &lim()).unwrap().num_trees();
        let mut perm: Vec<usize> = (0..bound).rev().collect();
        perm.extend((bound..n).rev());
        let (alg, relabel) = relabel_algebra(&sig, d, &perm, &lim()).unwrap();
        let r = rec(&sig, &alg, d, &lim()).unwrap();
        assert!(r.valid && r.square_holds);
        assert_eq!(r.rec.shape.obj_map, perm);
        assert!(morphism_eq(&r.rec, &relabel).is_some());
    }

    fn cantor(a: usize, b: usize) -> usize {
        (a + b) * (a + b + 1) / 2 + b
    }

    #[test]
    fn wrec_embeddings() {
        let list = Signature::list(1);
        let r = wrec_embedding_check(&list, 16, |s, k| if s == 0 { Some(0) } else { Some(k[0] + 1) }, 4, &lim()).unwrap();
        assert!(r.passed());
        assert_eq!(r.trees, 4);
        let r = wrec_embedding_check(&list, 16, |_, _| Some(0), 4, &lim()).unwrap();
        assert!(!r.precondition);
        let tree = Signature::binary_tree();
        let h = |s: usize, k: &[usize]| if s == 0 { Some(0) } else { Some(1 + cantor(k[0], k[1])) };
        let r = wrec_embedding_check(&tree, 64, h, 3, &lim()).unwrap();
        assert!(r.passed());
        assert_eq!(r.trees, 5);
    }
}
