use std::sync::Arc;

use serde::Serialize;

use super::derivative::tables;
use super::{derivative, CartMorphism, Container};
use crate::error::{Error, Result};
use crate::groupoid::{next_permutation, GFunctor};
use crate::limits::Limits;

/// Size of the search space for cartesian morphisms between discrete
/// containers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CandidateCount {
    /// `|T|^|S|`
    pub shape_maps: u128,
    /// Shape maps paired with per-position bijections of matching sizes.
    pub candidates: u128,
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn require_discrete(c: &Container) -> Result<()> {
    if c.shapes.is_discrete() && c.is_discrete() {
        Ok(())
    } else {
        Err(Error::Unsupported("morphism enumeration needs discrete containers".into()))
    }
}

fn sizes_match(f: &Container, s: usize, g: &Container, t: usize) -> bool {
    (0..f.indices.len()).all(|i| f.fiber(i, s).num_objects() == g.fiber(i, t).num_objects())
}

pub fn candidate_count(f: &Container, g: &Container) -> Result<CandidateCount> {
    require_discrete(f)?;
    require_discrete(g)?;
    let g = g.reindexed(&f.indices)?;
    let (ns, nt) = (f.num_shapes() as u32, g.num_shapes() as u128);
    let mut candidates: u128 = 1;
    for s in 0..f.num_shapes() {
        let per: u128 = (0..g.num_shapes())
            .filter(|&t| sizes_match(f, s, &g, t))
            .map(|t| {
                (0..f.indices.len())
                    .map(|i| factorial(g.fiber(i, t).num_objects()))
                    .product::<u128>()
            })
            .sum();
        candidates = candidates.saturating_mul(per);
    }
    Ok(CandidateCount {
        shape_maps: nt.saturating_pow(ns),
        candidates,
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        if !next_permutation(&mut p) {
            return out;
        }
    }
}

/// All `(t, per-index bijection)` choices for one source shape.
fn shape_options(f: &Container, s: usize, g: &Container) -> Vec<(usize, Vec<Vec<usize>>)> {
    let mut out = Vec::new();
    for t in 0..g.num_shapes() {
        if !sizes_match(f, s, g, t) {
            continue;
        }
        let mut combos: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
        for i in 0..f.indices.len() {
            let perms = permutations(g.fiber(i, t).num_objects());
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    perms.iter().map(move |p| {
                        let mut c = c.clone();
                        c.push(p.clone());
                        c
                    })
                })
                .collect();
        }
        out.extend(combos.into_iter().map(|c| (t, c)));
    }
    out
}

/// Visits every cartesian morphism `f ⊸ g` between discrete containers.
pub fn for_each_cart(
    f: &Arc<Container>,
    g: &Arc<Container>,
    limits: &Limits,
    mut visit: impl FnMut(CartMorphism),
) -> Result<()> {
    let count = candidate_count(f, g)?;
    let cap = limits.max_cells as u128;
    if count.candidates > cap {
        return Err(Error::SizeLimit {
            what: "cartesian morphism candidates".into(),
            actual: count.candidates.min(usize::MAX as u128) as usize,
            limit: limits.max_cells,
        });
    }
    if f.indices != g.indices {
        return Err(Error::IndexMismatch(format!("{:?} vs {:?}", f.indices, g.indices)));
    }
    let options: Vec<_> = (0..f.num_shapes()).map(|s| shape_options(f, s, g)).collect();
    if options.iter().any(|o| o.is_empty()) {
        return Ok(());
    }
    let mut choice = vec![0usize; f.num_shapes()];
    loop {
        let obj_map: Vec<usize> = choice.iter().enumerate().map(|(s, &c)| options[s][c].0).collect();
        let mor_map = (0..f.shapes.num_morphisms())
            .map(|m| g.shapes.identity(obj_map[f.shapes.src(m)]))
            .collect();
        let shape = GFunctor::new_unchecked(f.shapes.clone(), g.shapes.clone(), obj_map, mor_map);
        let pos = (0..f.indices.len())
            .map(|i| {
                (0..f.num_shapes())
                    .map(|s| {
                        let (t, perms) = &options[s][choice[s]];
                        let (tf, sf) = (g.fiber(i, *t), f.fiber(i, s));
                        let p = &perms[i];
                        tables(tf, sf, |x| p[x], |m| sf.identity(p[tf.src(m)]))
                    })
                    .collect()
            })
            .collect();
        visit(CartMorphism {
            source: f.clone(),
            target: g.clone(),
            shape,
            pos,
        });
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(());
            }
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

pub fn enumerate_carts(f: &Arc<Container>, g: &Arc<Container>, limits: &Limits) -> Result<Vec<CartMorphism>> {
    let mut out = Vec::new();
    for_each_cart(f, g, limits, |m| out.push(m))?;
    Ok(out)
}

/// Number of valid cartesian morphisms `f ⊸ g`, each one built and checked.
pub fn hom_count(f: &Container, g: &Container, limits: &Limits) -> Result<usize> {
    let g = Arc::new(g.reindexed(&f.indices)?);
    let f = Arc::new(f.clone());
    let mut n = 0;
    for_each_cart(&f, &g, limits, |m| {
        if m.validate().is_valid() {
            n += 1;
        }
    })?;
    Ok(n)
}

/// `1 ◁ Fin n`
pub fn fin_tuple(n: usize) -> Container {
    Container::discrete_unary(&[n])
}

/// `∂_i^n G`
pub fn iterated_derivative(g: &Container, i: &str, n: usize) -> Result<Container> {
    let mut c = g.clone();
    for _ in 0..n {
        c = derivative(&c, i)?.container;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::container::{idc, prod_c, with_hole, X};

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn adjunction_counts() {
        let g = Container::discrete_unary(&[2]);
        let dg = derivative(&g, X).unwrap().container;
        assert_eq!(hom_count(&idc(), &dg, &lim()).unwrap(), 2);
        assert_eq!(hom_count(&with_hole(&idc(), X).unwrap(), &g, &lim()).unwrap(), 2);
        assert_eq!(hom_count(&g, &g, &lim()).unwrap(), 2);
        let one = Container::discrete_unary(&[1]);
        let d1 = derivative(&one, X).unwrap().container;
        assert_eq!(hom_count(&one, &d1, &lim()).unwrap(), 0);
        assert_eq!(hom_count(&with_hole(&one, X).unwrap(), &one, &lim()).unwrap(), 0);
    }

    #[test]
    fn iterated_identity() {
        let g = Container::discrete_unary(&[2]);
        let d2 = iterated_derivative(&g, X, 2).unwrap();
        let lhs = hom_count(&idc(), &d2, &lim()).unwrap();
        let rhs = hom_count(&prod_c(&idc(), &fin_tuple(2)).unwrap(), &g, &lim()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, 0);
        let g = Container::discrete_unary(&[3, 1]);
        let d2 = iterated_derivative(&g, X, 2).unwrap();
        let lhs = hom_count(&idc(), &d2, &lim()).unwrap();
        let rhs = hom_count(&prod_c(&idc(), &fin_tuple(2)).unwrap(), &g, &lim()).unwrap();
        assert_eq!((lhs, rhs), (6, 6));
    }

    #[test]
    fn zero_tuple_is_product_unit() {
        let f = Container::discrete_unary(&[1, 2]);
        let g = Container::discrete_unary(&[2, 1, 1]);
        let a = hom_count(&f, &g, &lim()).unwrap();
        let b = hom_count(&prod_c(&f, &fin_tuple(0)).unwrap(), &g, &lim()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, 2 * 2);
    }

    #[test]
    fn cap_is_enforced() {
        let f = Container::discrete_unary(&[4, 4, 4]);
        let lim = Limits { max_cells: 100, ..Limits::default() };
        assert!(matches!(hom_count(&f, &f, &lim), Err(Error::SizeLimit { .. })));
    }
}
