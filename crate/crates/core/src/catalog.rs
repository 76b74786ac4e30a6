//! Seeded random instances for law and strength sweeps.
//!
//! Every draw is a pure function of the seed, so sweeps are reproducible.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::container::Container;
use crate::groupoid::{codisc, delooping, disc, product, sum_many, FinGroupoid, GFamily, GFunctor, PermGroup};

fn small_groups() -> Vec<PermGroup> {
    vec![
        PermGroup::cyclic(1),
        PermGroup::cyclic(2),
        PermGroup::cyclic(3),
        PermGroup::cyclic(4),
        PermGroup::generated(4, &[vec![1, 0, 3, 2], vec![2, 3, 0, 1]]).expect("Klein group"),
        PermGroup::symmetric(3),
    ]
}

/// Random instance generator.
pub struct Catalog {
    rng: ChaCha8Rng,
    groups: Vec<PermGroup>,
    max_fiber: usize,
}

impl Catalog {
    pub fn new(seed: u64) -> Self {
        Catalog {
            rng: ChaCha8Rng::seed_from_u64(seed),
            groups: small_groups(),
            max_fiber: 8,
        }
    }

    /// Caps the number of objects in the fibers drawn by [`Catalog::family`].
    pub fn with_max_fiber(mut self, n: usize) -> Self {
        self.max_fiber = n;
        self
    }

    /// A groupoid with at most `max_objects` objects and `max_morphisms`
    /// morphisms: a disjoint union of connected pieces `codisc(k) × BG`,
    /// shuffled.
    pub fn groupoid(&mut self, max_objects: usize, max_morphisms: usize) -> FinGroupoid {
        let target = self.rng.gen_range(0..=max_objects);
        let mut parts = Vec::new();
        let (mut objects, mut morphisms) = (0, 0);
        while objects < target {
            let k = self.rng.gen_range(1..=(target - objects).min(3));
            let fits: Vec<&PermGroup> = self
                .groups
                .iter()
                .filter(|g| morphisms + k * k * g.order() <= max_morphisms)
                .collect();
            let Some(g) = fits.choose(&mut self.rng).copied() else {
                if k == 1 {
                    break;
                }
                continue;
            };
            let part = product(&codisc(k), &delooping(g, |e| g.element_name(e)));
            objects += k;
            morphisms += part.num_morphisms();
            parts.push(part);
        }
        let refs: Vec<&FinGroupoid> = parts.iter().collect();
        let g = sum_many(&refs, |i, name| format!("{i}.{name}"));
        let mut obj_perm: Vec<usize> = (0..g.num_objects()).collect();
        let mut mor_perm: Vec<usize> = (0..g.num_morphisms()).collect();
        obj_perm.shuffle(&mut self.rng);
        mor_perm.shuffle(&mut self.rng);
        g.permuted(&obj_perm, &mor_perm)
    }

    /// A strict family over `base`. On each component the fiber is a small
    /// constant groupoid, or a set acted on by the automorphisms of the
    /// component's root: trivially, regularly, or both side by side.
    pub fn family(&mut self, base: &Arc<FinGroupoid>) -> GFamily {
        let labels = base.component_labels();
        let roots: Vec<usize> = base.components().iter().map(|c| c[0]).collect();
        let paths = base.spanning_paths();
        let mut kinds = Vec::with_capacity(roots.len());
        let cap = self.max_fiber;
        for &r in &roots {
            let autos = base.hom(r, r).len();
            let kind = match self.rng.gen_range(0..4) {
                0 => Kind::Constant(Arc::new(self.groupoid(cap.min(2), cap.min(4)))),
                2 if autos <= cap => Kind::Action { trivial: 0, regular: true },
                3 if autos < cap => Kind::Action {
                    trivial: self.rng.gen_range(1..=(cap - autos).min(2)),
                    regular: true,
                },
                _ => Kind::Action {
                    trivial: self.rng.gen_range(0..=cap.min(2)),
                    regular: false,
                },
            };
            kinds.push(kind);
        }
        let fiber_of = |c: usize| -> Arc<FinGroupoid> {
            match &kinds[c] {
                Kind::Constant(f) => f.clone(),
                Kind::Action { trivial, regular } => {
                    let r = roots[c];
                    Arc::new(disc(trivial + if *regular { base.hom(r, r).len() } else { 0 }))
                }
            }
        };
        let comp_fibers: Vec<Arc<FinGroupoid>> = (0..roots.len()).map(fiber_of).collect();
        let fibers: Vec<Arc<FinGroupoid>> = labels.iter().map(|&c| comp_fibers[c].clone()).collect();
        let transport = (0..base.num_morphisms())
            .map(|f| {
                let c = labels[base.src(f)];
                let fib = comp_fibers[c].clone();
                match &kinds[c] {
                    Kind::Constant(_) => GFunctor::identity(fib),
                    Kind::Action { trivial, regular } => {
                        let mut perm: Vec<usize> = (0..*trivial).collect();
                        if *regular {
                            let r = roots[c];
                            let autos = base.hom(r, r);
                            let back = base.inverse(paths[base.dst(f)]);
                            let g = base.compose(back, base.compose(f, paths[base.src(f)]));
                            perm.extend(autos.iter().map(|&x| {
                                let y = base.compose(g, x);
                                trivial + autos.iter().position(|&z| z == y).expect("automorphism")
                            }));
                        }
                        GFunctor::new_unchecked(fib.clone(), fib, perm.clone(), perm)
                    }
                }
            })
            .collect();
        GFamily::new(base.clone(), fibers, transport).expect("tables have matching sizes")
    }

    /// A discrete container over `indices` with `1..=max_shapes` shapes and
    /// at most `max_positions` positions per shape and index.
    pub fn discrete_container(&mut self, indices: &[&str], max_shapes: usize, max_positions: usize) -> Container {
        let n = self.rng.gen_range(1..=max_shapes);
        let sizes: Vec<Vec<usize>> = indices
            .iter()
            .map(|_| (0..n).map(|_| self.rng.gen_range(0..=max_positions)).collect())
            .collect();
        Container::discrete(indices, &sizes)
    }

    /// A container with a random shape groupoid and random position families.
    pub fn groupoid_container(&mut self, indices: &[&str], max_objects: usize, max_morphisms: usize) -> Container {
        let shapes = loop {
            let g = self.groupoid(max_objects, max_morphisms);
            if g.num_objects() > 0 {
                break Arc::new(g);
            }
        };
        let positions = indices.iter().map(|_| self.family(&shapes)).collect();
        Container::new(indices.iter().map(|s| s.to_string()).collect(), shapes, positions)
            .expect("random families are strict")
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}

enum Kind {
    Constant(Arc<FinGroupoid>),
    Action { trivial: usize, regular: bool },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_valid_and_reproducible() {
        let mut a = Catalog::new(7);
        let mut b = Catalog::new(7);
        for _ in 0..100 {
            let g = Arc::new(a.groupoid(6, 16));
            let h = b.groupoid(6, 16);
            assert_eq!(*g, h);
            assert!(g.validate().is_valid());
            assert!(g.num_objects() <= 6 && g.num_morphisms() <= 16);
            assert!(a.family(&g).validate().is_valid());
            b.family(&g);
        }
    }

    #[test]
    fn containers_validate() {
        let mut c = Catalog::new(3);
        for _ in 0..30 {
            assert!(c.groupoid_container(&["x", "y"], 3, 8).validate().is_valid());
            let d = c.discrete_container(&["x", "y"], 3, 3);
            assert!((1..=3).contains(&d.num_shapes()));
            assert_eq!(d.positions.len(), 2);
            assert!(d.validate().is_valid());
        }
    }
}
