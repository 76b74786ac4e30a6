use std::sync::Arc;

use serde::Serialize;

use super::derivative::{tables, Derivative};
use super::{derivative, prod_c, sum_c, CartMorphism, Container};
use crate::error::{Error, Result};
use crate::groupoid::{bag_shapes, equiv_invariant, GEquivReport, GFamily, GFunctor, PermGroup};

/// A canonical comparison morphism with its checks.
#[derive(Debug, Clone)]
pub struct LawReport {
    pub law: &'static str,
    pub morphism: CartMorphism,
    pub valid: bool,
    pub equivalence: GEquivReport,
}

impl LawReport {
    fn new(law: &'static str, morphism: CartMorphism) -> Self {
        let valid = morphism.validate().is_valid();
        let equivalence = morphism.shape.equivalence_report();
        LawReport {
            law,
            morphism,
            valid,
            equivalence,
        }
    }

    pub fn holds(&self) -> bool {
        self.valid && self.equivalence.is_equivalence()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "law": self.law,
            "source_shapes": self.morphism.source.num_shapes(),
            "target_shapes": self.morphism.target.num_shapes(),
            "valid": self.valid,
            "equivalence": self.equivalence.flags_json(),
        })
    }
}

/// Shape object and morphism tables of a map into `∂ H`, given for each
/// source shape the `(shape of H, isolated position)` it picks and for each
/// source morphism the `(morphism of H, position morphism)`.
fn into_derivative(
    source: &Arc<Container>,
    dh: &Derivative,
    h: &Container,
    obj: impl Fn(usize) -> (usize, usize),
    mor: impl Fn(usize) -> (usize, usize),
) -> GFunctor {
    let shapes = &source.shapes;
    GFunctor::new_unchecked(
        shapes.clone(),
        dh.container.shapes.clone(),
        (0..shapes.num_objects())
            .map(|o| {
                let (s, p) = obj(o);
                dh.shape_index(s, p).expect("isolated position")
            })
            .collect(),
        (0..shapes.num_morphisms())
            .map(|m| {
                let (phi, pi) = mor(m);
                dh.shape_mor(phi, pi, &h.shapes).expect("isolated position morphism")
            })
            .collect(),
    )
}

/// `∂F ⊕ ∂G ⊸ ∂(F ⊕ G)`
pub fn law_sum(f: &Container, g: &Container, i: &str) -> Result<LawReport> {
    let df = derivative(f, i)?;
    let g = g.reindexed(&f.indices)?;
    let dg = derivative(&g, i)?;
    let h = sum_c(f, &g)?;
    let dh = derivative(&h, i)?;
    let source = Arc::new(sum_c(&df.container, &dg.container)?);
    let (nd, md) = (df.container.shapes.num_objects(), df.container.shapes.num_morphisms());
    let (ns, ms) = (f.shapes.num_objects(), f.shapes.num_morphisms());
    let shape = into_derivative(
        &source,
        &dh,
        &h,
        |o| {
            if o < nd {
                df.shape_coords(o)
            } else {
                let (t, q) = dg.shape_coords(o - nd);
                (ns + t, q)
            }
        },
        |m| {
            if m < md {
                df.shape_mor_coords(m, &f.shapes)
            } else {
                let (psi, rho) = dg.shape_mor_coords(m - md, &g.shapes);
                (ms + psi, rho)
            }
        },
    );
    let target = Arc::new(dh.container);
    let pos = (0..source.indices.len())
        .map(|j| {
            (0..source.num_shapes())
                .map(|o| tables(target.fiber(j, shape.obj(o)), source.fiber(j, o), |x| x, |x| x))
                .collect()
        })
        .collect();
    Ok(LawReport::new(
        "sum",
        CartMorphism {
            source,
            target,
            shape,
            pos,
        },
    ))
}

/// `(∂F × G) ⊕ (F × ∂G) ⊸ ∂(F × G)`
pub fn law_leibniz(f: &Container, g: &Container, i: &str) -> Result<LawReport> {
    let ix = f.index_of(i)?;
    let df = derivative(f, i)?;
    let g = g.reindexed(&f.indices)?;
    let dg = derivative(&g, i)?;
    let h = prod_c(f, &g)?;
    let dh = derivative(&h, i)?;
    let left = prod_c(&df.container, &g)?;
    let right = prod_c(f, &dg.container)?;
    let source = Arc::new(sum_c(&left, &right)?);
    let (nt, mt) = (g.shapes.num_objects(), g.shapes.num_morphisms());
    let (ndg, mdg) = (dg.container.shapes.num_objects(), dg.container.shapes.num_morphisms());
    let (nl, ml) = (left.shapes.num_objects(), left.shapes.num_morphisms());
    let p_objs = |s: usize| f.fiber(ix, s).num_objects();
    let p_mors = |s: usize| f.fiber(ix, s).num_morphisms();
    // source shape -> (side, F shape, G shape, derivative shape on that side)
    let split = |o: usize| -> (bool, usize, usize, usize) {
        if o < nl {
            let (od, t) = (o / nt, o % nt);
            (true, df.sigma.obj_coords(od).0, t, od)
        } else {
            let o = o - nl;
            let (s, od) = (o / ndg, o % ndg);
            (false, s, dg.sigma.obj_coords(od).0, od)
        }
    };
    let shape = into_derivative(
        &source,
        &dh,
        &h,
        |o| {
            let (is_left, s, t, od) = split(o);
            if is_left {
                (s * nt + t, df.shape_coords(od).1)
            } else {
                (s * nt + t, p_objs(s) + dg.shape_coords(od).1)
            }
        },
        |m| {
            if m < ml {
                let (kd, psi) = (m / mt, m % mt);
                let (phi, pi) = df.shape_mor_coords(kd, &f.shapes);
                (phi * mt + psi, pi)
            } else {
                let m = m - ml;
                let (phi, kd) = (m / mdg, m % mdg);
                let (psi, rho) = dg.shape_mor_coords(kd, &g.shapes);
                (phi * mt + psi, p_mors(f.shapes.dst(phi)) + rho)
            }
        },
    );
    let target = Arc::new(dh.container);
    let pos = (0..source.indices.len())
        .map(|j| {
            (0..source.num_shapes())
                .map(|o| {
                    let (tf, sf) = (target.fiber(j, shape.obj(o)), source.fiber(j, o));
                    if j != ix {
                        return tables(tf, sf, |x| x, |x| x);
                    }
                    let (is_left, s, _, od) = split(o);
                    let sub = &dh.removals[shape.obj(o)];
                    let (np, mp) = (p_objs(s), p_mors(s));
                    if is_left {
                        let rem = &df.removals[od];
                        let (nr, mr) = (rem.groupoid.num_objects(), rem.groupoid.num_morphisms());
                        tables(
                            tf,
                            sf,
                            |x| {
                                let a = sub.from_sub[x];
                                if a < np { rem.to_sub[a].expect("kept") } else { nr + a - np }
                            },
                            |x| {
                                let a = sub.mor_from_sub[x];
                                if a < mp { rem.mor_to_sub[a].expect("kept") } else { mr + a - mp }
                            },
                        )
                    } else {
                        let rem = &dg.removals[od];
                        tables(
                            tf,
                            sf,
                            |x| {
                                let a = sub.from_sub[x];
                                if a < np { a } else { np + rem.to_sub[a - np].expect("kept") }
                            },
                            |x| {
                                let a = sub.mor_from_sub[x];
                                if a < mp { a } else { mp + rem.mor_to_sub[a - mp].expect("kept") }
                            },
                        )
                    }
                })
                .collect()
        })
        .collect();
    Ok(LawReport::new(
        "leibniz",
        CartMorphism {
            source,
            target,
            shape,
            pos,
        },
    ))
}

/// Bags of at most `n` elements: one shape per size, with the symmetric group
/// acting on the positions.
pub fn bag_container(n: usize) -> Result<Container> {
    if n > 4 {
        return Err(Error::SizeLimit {
            what: "bag size".into(),
            actual: n,
            limit: 4,
        });
    }
    let shapes = Arc::new(bag_shapes(n));
    let perms: Vec<Vec<usize>> = (0..=n)
        .flat_map(|k| PermGroup::symmetric(k).elements)
        .collect();
    let fam = GFamily::discrete(shapes.clone(), |s| s, |m| perms[m].clone());
    Container::unary(shapes, fam)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BagReport {
    pub n: usize,
    /// Automorphism group orders of the derivative's shape components.
    pub derivative_orders: Vec<usize>,
    pub expected_orders: Vec<usize>,
    pub derivative_groups: Vec<String>,
    pub smaller_bag_groups: Vec<String>,
    pub equivalent_to_smaller_bag: bool,
    pub removal_fibers_ok: bool,
}

impl BagReport {
    pub fn passed(&self) -> bool {
        self.equivalent_to_smaller_bag && self.removal_fibers_ok && self.derivative_orders == self.expected_orders
    }
}

/// Compares `∂Bag_n` with `Bag_{n-1}`.
pub fn bag_fixed_point_check(n: usize) -> Result<BagReport> {
    if n == 0 {
        return Err(Error::Precondition("bag size must be at least 1".into()));
    }
    let bag = bag_container(n)?;
    let d = derivative(&bag, super::X)?;
    let inv = equiv_invariant(&d.container.shapes);
    let smaller = equiv_invariant(&bag_shapes(n - 1));
    let mut derivative_orders = inv.orders();
    derivative_orders.sort_unstable();
    let mut expected_orders: Vec<usize> = (1..=n).map(|k| (1..k).product()).collect();
    expected_orders.sort_unstable();
    let removal_fibers_ok = (0..d.container.num_shapes()).all(|o| {
        let (size, _) = d.shape_coords(o);
        let fib = d.container.fiber(0, o);
        fib.is_discrete() && fib.num_objects() + 1 == size
    });
    Ok(BagReport {
        n,
        derivative_orders,
        expected_orders,
        derivative_groups: inv.describe(),
        smaller_bag_groups: smaller.describe(),
        equivalent_to_smaller_bag: inv == smaller,
        removal_fibers_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::container::{const_c, single_shape_groupoid, X};
    use crate::groupoid::{bz2, disc};

    #[test]
    fn sum_rule_small() {
        let f = Container::discrete_unary(&[2]);
        let g = Container::discrete_unary(&[3, 0]);
        let r = law_sum(&f, &g, X).unwrap();
        assert!(r.holds(), "{:?}", r.equivalence);
        assert_eq!(r.morphism.source.num_shapes(), 5);
        let r = law_sum(&const_c(&[X], disc(2)), &g, X).unwrap();
        assert!(r.holds());
        assert_eq!(r.morphism.source.num_shapes(), 3);
    }

    #[test]
    fn leibniz_small() {
        let f = Container::discrete_unary(&[2]);
        let g = Container::discrete_unary(&[3]);
        let r = law_leibniz(&f, &g, X).unwrap();
        assert!(r.holds(), "{:?}", r.equivalence);
        assert_eq!(r.morphism.target.num_shapes(), 5);
    }

    #[test]
    fn leibniz_with_groupoid_positions() {
        let f = Container::discrete_unary(&[2]);
        let g = single_shape_groupoid(bz2());
        let r = law_leibniz(&f, &g, X).unwrap();
        assert!(r.holds());
        assert_eq!(r.morphism.target.num_shapes(), 2);
    }

    #[test]
    fn leibniz_two_indices() {
        let f = Container::discrete(&["x", "y"], &[vec![1, 2], vec![1, 0]]);
        let g = Container::discrete(&["x", "y"], &[vec![1], vec![2]]);
        for i in ["x", "y"] {
            assert!(law_leibniz(&f, &g, i).unwrap().holds());
            assert!(law_sum(&f, &g, i).unwrap().holds());
        }
    }

    #[test]
    fn bag_fixed_point() {
        for n in 1..=3 {
            let r = bag_fixed_point_check(n).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        assert!(bag_container(3).unwrap().validate().is_valid());
        assert!(bag_fixed_point_check(5).is_err());
    }
}
