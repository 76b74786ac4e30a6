use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use super::zipper::{Hole, Layer, ZipperValue};
use super::{decompose, enumerate_wtrees, fill, wpaths, Signature, WPath, WTree};
use crate::chain::{self, FailingCell, Parts};
use crate::container::{const_c, derivative, is_container_equivalence, subst, CartMorphism, Container, Derivative, SubstShape};
use crate::error::Result;
use crate::groupoid::disc;
use crate::limits::Limits;

/// `μ_0 = 0` and `μ_k = F[μ_{k-1}]`: the fixed point unfolded `depth` times.
/// Shapes of `μ_k` are the trees of depth at most `k`, with their
/// automorphisms when the signature has groupoid shapes or positions.
#[derive(Debug, Clone)]
pub struct MuTower {
    pub signature: Signature,
    pub levels: Vec<Arc<Container>>,
    /// `substs[k - 1] = F[μ_{k-1}]`
    pub substs: Vec<SubstShape>,
}

pub fn mu_tower(sig: &Signature, depth: usize, limits: &Limits) -> Result<MuTower> {
    let params = sig.params();
    let names: Vec<&str> = params.iter().map(String::as_str).collect();
    let mut levels = vec![Arc::new(const_c(&names, disc(0)))];
    let mut substs = Vec::with_capacity(depth);
    for k in 1..=depth {
        let s = subst(&sig.container, &sig.star, &levels[k - 1], limits)?;
        levels.push(Arc::new(s.container.clone()));
        substs.push(s);
    }
    Ok(MuTower {
        signature: sig.clone(),
        levels,
        substs,
    })
}

impl MuTower {
    pub fn depth(&self) -> usize {
        self.substs.len()
    }

    /// The tree at shape `o` of `μ_k`.
    pub fn decode_tree(&self, k: usize, o: usize) -> WTree {
        let (s, h) = self.substs[k - 1].shape_coords(o);
        WTree::new(s, h.obj_map.iter().map(|&t| self.decode_tree(k - 1, t)).collect())
    }

    /// The path at position `x` of parameter ordinal `j` in shape `o` of `μ_k`.
    pub fn decode_path(&self, k: usize, j: usize, o: usize, x: usize) -> WPath {
        let sub = &self.substs[k - 1];
        let n = sub.outer_positions(j, o);
        if x < n {
            return WPath::Top(x);
        }
        let (p, q) = sub.inner[j][o].obj_coords(x - n);
        let (_, h) = sub.shape_coords(o);
        WPath::below(p, self.decode_path(k - 1, j, h.obj(p), q))
    }
}

/// `MuRule : μF' ⊸ ∂_i(μF)` up to depth `d`, built level by level as
/// `M_k = Chain_{F, μ_{k-1}} ∘ (id ⊕ (id × M_{k-1}))`, where the domain of
/// `M_k` is `F'[dom M_{k-1}] ≃ ∂_iF[μ_{k-1}] ⊕ (∂⋆F[μ_{k-1}] × dom M_{k-1})`.
pub struct MuRule {
    pub tower: MuTower,
    pub index: String,
    pub ordinal: usize,
    /// `M_0, …, M_d`
    pub levels: Vec<CartMorphism>,
    /// Strength of `Chain_{F, μ_{k-1}}` for `k = 1..=d`.
    pub chain_strong: Vec<bool>,
    pub failing_cells: Vec<Option<FailingCell>>,
    /// `∂_i μ_d`
    pub holes: Derivative,
    parts: Vec<Parts>,
}

impl std::fmt::Debug for MuRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MuRule")
            .field("index", &self.index)
            .field("depth", &self.tower.depth())
            .field("chain_strong", &self.chain_strong)
            .finish_non_exhaustive()
    }
}

pub fn mu_rule(sig: &Signature, i: &str, depth: usize, limits: &Limits) -> Result<MuRule> {
    let ordinal = sig.param_ordinal(i)?;
    let tower = mu_tower(sig, depth, limits)?;
    let zero = Arc::new(derivative(&tower.levels[0], i)?.container);
    let mut levels = vec![CartMorphism::identity(zero)];
    let mut chain_strong = Vec::with_capacity(depth);
    let mut failing_cells = Vec::with_capacity(depth);
    let mut parts = Vec::with_capacity(depth);
    for k in 1..=depth {
        let g = &tower.levels[k - 1];
        let p = chain::build(&sig.container, &sig.star, g, i, limits)?;
        let cell = chain::sigma_isolate_failure(&p, g, ordinal);
        let m = chain::copair(&p.left, &p.right)?;
        let rep = chain::report(m, cell);
        let left = CartMorphism::identity(p.left.source.clone());
        let right = CartMorphism::identity(Arc::new(p.rsub.container.clone()));
        let lifted = CartMorphism::sum(&left, &CartMorphism::product(&right, &levels[k - 1])?)?;
        levels.push(rep.morphism.after(&lifted)?);
        chain_strong.push(rep.is_strong);
        failing_cells.push(rep.failing_cell);
        parts.push(p);
    }
    let holes = derivative(&tower.levels[depth], i)?;
    Ok(MuRule {
        tower,
        index: i.to_string(),
        ordinal,
        levels,
        chain_strong,
        failing_cells,
        holes,
        parts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MuRuleReport {
    pub signature: String,
    pub index: String,
    pub depth: usize,
    pub domain_shapes: usize,
    pub domain_classes: usize,
    pub hole_shapes: usize,
    pub hole_classes: usize,
    /// `Σ_w |paths_i(w)|` over the enumerated trees, for discrete signatures.
    pub oracle_holes: Option<usize>,
    /// The unfolded tower has exactly the enumerated trees.
    pub trees_agree: Option<bool>,
    /// Decoded μ-rule values fill to the decoded holes, and decompose back.
    pub zipper_agrees: Option<bool>,
    pub valid: bool,
    pub embedding: bool,
    pub counts_match: bool,
    pub strong: bool,
    pub chain_strong: bool,
    pub flags_agree: bool,
    pub failing_cell: Option<FailingCell>,
}

impl MuRuleReport {
    /// The checks that hold for every signature.
    pub fn passed(&self) -> bool {
        self.valid
            && self.embedding
            && self.flags_agree
            && self.trees_agree != Some(false)
            && self.zipper_agrees != Some(false)
            && self.oracle_holes.is_none_or(|n| n == self.hole_shapes)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(self)
    }
}

impl MuRule {
    pub fn depth(&self) -> usize {
        self.tower.depth()
    }

    pub fn top(&self) -> &CartMorphism {
        &self.levels[self.depth()]
    }

    /// The μ-rule value at shape `o` of the level-`k` domain.
    pub fn decode_domain(&self, k: usize, o: usize) -> ZipperValue {
        let p = &self.parts[k - 1];
        let nl = p.left.source.num_shapes();
        if o < nl {
            let (sd, h) = p.lsub.shape_coords(o);
            let (s, p0) = p.dfi.shape_coords(sd);
            let kids = h.obj_map.iter().map(|&t| self.tower.decode_tree(k - 1, t)).collect();
            return ZipperValue {
                layers: Vec::new(),
                focus: WTree::new(s, kids),
                hole: Some(Hole {
                    index: self.ordinal,
                    position: p0,
                }),
            };
        }
        let nz = self.levels[k - 1].source.num_shapes();
        let (a, b) = ((o - nl) / nz, (o - nl) % nz);
        let (sd, f) = p.rsub.shape_coords(a);
        let (s, p1) = p.dfs.shape_coords(sd);
        let siblings = f.obj_map.iter().map(|&t| self.tower.decode_tree(k - 1, t)).collect();
        let mut z = self.decode_domain(k - 1, b);
        z.layers.insert(
            0,
            Layer {
                shape: s,
                hole: p1,
                siblings,
            },
        );
        z
    }

    /// The tree and path at shape `r` of `∂_i μ_d`.
    pub fn decode_hole(&self, r: usize) -> (WTree, WPath) {
        let d = self.depth();
        let (o, x) = self.holes.shape_coords(r);
        (self.tower.decode_tree(d, o), self.tower.decode_path(d, self.ordinal, o, x))
    }

    fn trees_agree(&self) -> Result<bool> {
        let sig = &self.tower.signature;
        let d = self.depth();
        let expected: HashSet<WTree> = enumerate_wtrees(sig, d, &Limits::default())?.into_iter().collect();
        let n = self.tower.levels[d].num_shapes();
        let got: HashSet<WTree> = (0..n).map(|o| self.tower.decode_tree(d, o)).collect();
        Ok(got.len() == n && got == expected)
    }

    fn zipper_agrees(&self) -> Result<bool> {
        let sig = &self.tower.signature;
        let top = self.top();
        for o in 0..top.source.num_shapes() {
            let z = self.decode_domain(self.depth(), o);
            let (w, p) = self.decode_hole(top.shape.obj(o));
            if fill(sig, &z)? != (w.clone(), p.clone()) || decompose(sig, &self.index, &w, &p)? != z {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn report(&self) -> Result<MuRuleReport> {
        let sig = &self.tower.signature;
        let top = self.top();
        let src = &top.source.shapes;
        let tgt = &top.target.shapes;
        let valid = top.validate().is_valid();
        let embedding = top.shape.equivalence_report().is_embedding();
        let (domain_classes, hole_classes) = (src.num_components(), tgt.num_components());
        let strong = valid && is_container_equivalence(top);
        let chain_strong = self.chain_strong.iter().all(|&b| b);
        let discrete = sig.is_discrete();
        let oracle_holes = if discrete {
            let mut n = 0;
            for w in enumerate_wtrees(sig, self.depth(), &Limits::default())? {
                n += wpaths(sig, &self.index, &w)?.len();
            }
            Some(n)
        } else {
            None
        };
        Ok(MuRuleReport {
            signature: sig.name.clone(),
            index: self.index.clone(),
            depth: self.depth(),
            domain_shapes: src.num_objects(),
            domain_classes,
            hole_shapes: tgt.num_objects(),
            hole_classes,
            oracle_holes,
            trees_agree: if discrete { Some(self.trees_agree()?) } else { None },
            zipper_agrees: if discrete { Some(self.zipper_agrees()?) } else { None },
            valid,
            embedding,
            counts_match: embedding && domain_classes == hole_classes,
            strong,
            chain_strong,
            flags_agree: strong == chain_strong,
            failing_cell: self.failing_cells.iter().flatten().next().cloned(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> Limits {
        Limits::default()
    }

    fn list_holes_oracle(e: usize, max_len: usize) -> usize {
        (0..=max_len).map(|n| n * e.pow(n as u32)).sum()
    }

    #[test]
    fn tower_matches_enumeration() {
        let sig = Signature::binary_tree();
        let t = mu_tower(&sig, 3, &lim()).unwrap();
        assert_eq!(t.levels[3].num_shapes(), 5);
        let w = t.decode_tree(3, 4);
        assert!(w.depth() <= 3);
    }

    #[test]
    fn list_rule_counts() {
        let r = mu_rule(&Signature::list(1), "x", 4, &lim()).unwrap().report().unwrap();
        assert_eq!(r.domain_shapes, 6);
        assert_eq!(r.hole_shapes, list_holes_oracle(1, 3));
        assert!(r.passed() && r.strong && r.chain_strong);
        let r = mu_rule(&Signature::list(2), "x", 5, &lim()).unwrap().report().unwrap();
        assert_eq!(r.domain_shapes, 98);
        assert_eq!(r.hole_shapes, list_holes_oracle(2, 4));
        assert_eq!(r.oracle_holes, Some(98));
        assert!(r.passed() && r.strong && r.counts_match);
    }

    #[test]
    fn binary_tree_rule() {
        let r = mu_rule(&Signature::binary_tree(), "x", 3, &lim()).unwrap().report().unwrap();
        assert_eq!(r.hole_shapes, 8);
        assert!(r.passed() && r.strong);
    }

    #[test]
    fn twisted_rule_is_an_embedding_only() {
        let r = mu_rule(&Signature::twisted(), "x", 3, &lim()).unwrap().report().unwrap();
        assert!(r.valid && r.embedding);
        assert!(!r.counts_match && !r.strong && !r.chain_strong);
        assert!(r.flags_agree);
        assert!(r.domain_classes < r.hole_classes);
        assert!(r.failing_cell.is_some());
    }
}
