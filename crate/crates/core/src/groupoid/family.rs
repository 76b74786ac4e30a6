use std::sync::Arc;

use super::functor::same_groupoid;
use super::{FinGroupoid, GFunctor, Morphism};
use crate::error::{Error, Result};
use crate::validation::ValidationReport;

/// A strict functor from a base groupoid into groupoids: one fiber per base
/// object and one transport functor per base morphism.
#[derive(Debug, Clone)]
pub struct GFamily {
    pub base: Arc<FinGroupoid>,
    pub fibers: Vec<Arc<FinGroupoid>>,
    pub transport: Vec<GFunctor>,
}

impl GFamily {
    pub fn new(
        base: Arc<FinGroupoid>,
        fibers: Vec<Arc<FinGroupoid>>,
        transport: Vec<GFunctor>,
    ) -> Result<Self> {
        if fibers.len() != base.num_objects() || transport.len() != base.num_morphisms() {
            return Err(Error::InvalidFamily("table size mismatch".into()));
        }
        for (f, t) in transport.iter().enumerate() {
            if !same_groupoid(&t.source, &fibers[base.src(f)])
                || !same_groupoid(&t.target, &fibers[base.dst(f)])
            {
                return Err(Error::InvalidFamily(format!(
                    "transport along {} has wrong endpoints",
                    base.morphism_name(f)
                )));
            }
        }
        Ok(GFamily {
            base,
            fibers,
            transport,
        })
    }

    /// The same fiber everywhere, transported by identities.
    pub fn constant(base: Arc<FinGroupoid>, fiber: Arc<FinGroupoid>) -> Self {
        let fibers = vec![fiber.clone(); base.num_objects()];
        let transport = vec![GFunctor::identity(fiber); base.num_morphisms()];
        GFamily {
            base,
            fibers,
            transport,
        }
    }

    /// Discrete fibers `0..n(a)` with transport given by permutations
    /// `perm(f)[x]`.
    pub fn discrete(
        base: Arc<FinGroupoid>,
        size: impl Fn(usize) -> usize,
        perm: impl Fn(usize) -> Vec<usize>,
    ) -> Self {
        let fibers: Vec<Arc<FinGroupoid>> = (0..base.num_objects())
            .map(|a| Arc::new(super::disc(size(a))))
            .collect();
        let transport = (0..base.num_morphisms())
            .map(|f| {
                let p = perm(f);
                GFunctor::new_unchecked(
                    fibers[base.src(f)].clone(),
                    fibers[base.dst(f)].clone(),
                    p.clone(),
                    p,
                )
            })
            .collect();
        GFamily {
            base,
            fibers,
            transport,
        }
    }

    pub fn fiber(&self, a: usize) -> &Arc<FinGroupoid> {
        &self.fibers[a]
    }

    pub fn transport_obj(&self, f: usize, x: usize) -> usize {
        self.transport[f].obj(x)
    }

    pub fn transport_mor(&self, f: usize, m: usize) -> usize {
        self.transport[f].mor(m)
    }

    pub fn is_discrete(&self) -> bool {
        self.fibers.iter().all(|g| g.is_discrete())
    }

    /// Strict functoriality on every identity and composable pair.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let base = &*self.base;
        for (f, t) in self.transport.iter().enumerate() {
            let r = t.validate();
            if !r.is_valid() {
                report.extend(&format!("transport {}: ", base.morphism_name(f)), r);
            }
        }
        if !report.is_valid() {
            return report;
        }
        for a in 0..base.num_objects() {
            if !self.transport[base.identity(a)].is_identity() {
                report.push(
                    "transport identity",
                    format!("id({})", base.object_name(a)),
                );
            }
        }
        for (&(g, f), &gf) in base.compose_table() {
            let composite = self.transport[g].after(&self.transport[f]);
            if !composite.same_tables(&self.transport[gf]) {
                report.push(
                    "transport composition",
                    format!("{}∘{}", base.morphism_name(g), base.morphism_name(f)),
                );
            }
        }
        report
    }

    /// Reindexing along `f : C -> base`.
    pub fn pullback(&self, f: &GFunctor) -> GFamily {
        debug_assert!(same_groupoid(&f.target, &self.base));
        GFamily {
            base: f.source.clone(),
            fibers: f.obj_map.iter().map(|&a| self.fibers[a].clone()).collect(),
            transport: f
                .mor_map
                .iter()
                .map(|&m| self.transport[m].clone())
                .collect(),
        }
    }

    pub fn sigma(&self) -> Sigma {
        Sigma::new(self)
    }

    /// Total number of fiber objects, summed over the base.
    pub fn total_objects(&self) -> usize {
        self.fibers.iter().map(|g| g.num_objects()).sum()
    }
}

/// The Grothendieck construction `Σ_a B(a)` with index translation.
///
/// Object `(a, x)` is laid out base object by base object. A morphism
/// `(f, φ) : (a, x) -> (a', x')` pairs `f : a -> a'` with
/// `φ : T_f(x) -> x'` in the fiber over `a'`.
#[derive(Debug, Clone)]
pub struct Sigma {
    pub groupoid: Arc<FinGroupoid>,
    obj_offset: Vec<usize>,
    mor_offset: Vec<usize>,
    obj_coords: Vec<(usize, usize)>,
    mor_coords: Vec<(usize, usize)>,
}

impl Sigma {
    fn new(fam: &GFamily) -> Self {
        let base = &*fam.base;
        let mut obj_offset = Vec::with_capacity(base.num_objects());
        let mut obj_coords = Vec::new();
        let mut objects = Vec::new();
        for a in 0..base.num_objects() {
            obj_offset.push(obj_coords.len());
            let fib = &fam.fibers[a];
            for x in 0..fib.num_objects() {
                obj_coords.push((a, x));
                objects.push(format!("({},{})", base.object_name(a), fib.object_name(x)));
            }
        }
        let mut mor_offset = Vec::with_capacity(base.num_morphisms());
        let mut mor_coords = Vec::new();
        let mut morphisms = Vec::new();
        for f in 0..base.num_morphisms() {
            mor_offset.push(mor_coords.len());
            let (a, a2) = (base.src(f), base.dst(f));
            let fib2 = &fam.fibers[a2];
            let back = &fam.transport[base.inverse(f)];
            for phi in 0..fib2.num_morphisms() {
                mor_coords.push((f, phi));
                let x = back.obj(fib2.src(phi));
                morphisms.push(Morphism {
                    name: format!("({},{})", base.morphism_name(f), fib2.morphism_name(phi)),
                    src: obj_offset[a] + x,
                    dst: obj_offset[a2] + fib2.dst(phi),
                });
            }
        }
        let identity = (0..obj_coords.len())
            .map(|o| {
                let (a, x) = obj_coords[o];
                mor_offset[base.identity(a)] + fam.fibers[a].identity(x)
            })
            .collect();
        let inverse = (0..mor_coords.len())
            .map(|m| {
                let (f, phi) = mor_coords[m];
                let finv = base.inverse(f);
                let fib2 = &fam.fibers[base.dst(f)];
                let phi_inv = fam.transport[finv].mor(fib2.inverse(phi));
                mor_offset[finv] + phi_inv
            })
            .collect();
        let groupoid = FinGroupoid::generate(objects, morphisms, identity, inverse, |h, k| {
            // (g, ψ) ∘ (f, φ) = (g∘f, ψ ∘ T_g(φ))
            let (f, phi) = mor_coords[k];
            let (g, psi) = mor_coords[h];
            let gf = base.compose(g, f);
            let fib3 = &fam.fibers[base.dst(g)];
            let moved = fam.transport[g].mor(phi);
            mor_offset[gf] + fib3.compose(psi, moved)
        });
        Sigma {
            groupoid: Arc::new(groupoid),
            obj_offset,
            mor_offset,
            obj_coords,
            mor_coords,
        }
    }

    pub fn obj(&self, a: usize, x: usize) -> usize {
        self.obj_offset[a] + x
    }

    pub fn mor(&self, f: usize, phi: usize) -> usize {
        self.mor_offset[f] + phi
    }

    pub fn obj_coords(&self, o: usize) -> (usize, usize) {
        self.obj_coords[o]
    }

    pub fn mor_coords(&self, m: usize) -> (usize, usize) {
        self.mor_coords[m]
    }

    pub fn projection(&self, base: &Arc<FinGroupoid>) -> GFunctor {
        GFunctor::new_unchecked(
            self.groupoid.clone(),
            base.clone(),
            self.obj_coords.iter().map(|&(a, _)| a).collect(),
            self.mor_coords.iter().map(|&(f, _)| f).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{bz2, codisc, disc, unit};

    fn swap_family() -> GFamily {
        let base = Arc::new(bz2());
        GFamily::discrete(base, |_| 2, |f| if f == 0 { vec![0, 1] } else { vec![1, 0] })
    }

    #[test]
    fn constant_family_valid() {
        let f = GFamily::constant(Arc::new(bz2()), Arc::new(disc(3)));
        assert!(f.validate().is_valid());
    }

    #[test]
    fn swap_family_valid() {
        assert!(swap_family().validate().is_valid());
    }

    #[test]
    fn broken_composite_rejected() {
        // σ∘σ = e but a 3-cycle squared is not the identity
        let base = Arc::new(bz2());
        let fam = GFamily::discrete(base, |_| 3, |f| if f == 0 { vec![0, 1, 2] } else { vec![1, 2, 0] });
        let report = fam.validate();
        assert!(!report.is_valid());
        assert_eq!(report.violations[0].law, "transport composition");
    }

    #[test]
    fn sigma_of_swap_family_is_codisc2() {
        let sig = swap_family().sigma();
        let g = &sig.groupoid;
        assert!(g.validate().is_valid());
        assert_eq!(g.num_objects(), 2);
        assert_eq!(g.num_components(), 1);
        assert_eq!(g.aut_order(0), 1);
    }

    #[test]
    fn sigma_of_constant_is_product() {
        let fam = GFamily::constant(Arc::new(bz2()), Arc::new(codisc(2)));
        let sig = fam.sigma();
        assert!(sig.groupoid.validate().is_valid());
        assert_eq!(sig.groupoid.num_morphisms(), 8);
        let p = sig.projection(&fam.base);
        assert!(p.validate().is_valid());
    }

    #[test]
    fn pullback_along_point() {
        let fam = swap_family();
        let f = GFunctor::new(Arc::new(unit()), fam.base.clone(), vec![0], vec![0]).unwrap();
        let pb = fam.pullback(&f);
        assert!(pb.validate().is_valid());
        assert_eq!(pb.fibers[0].num_objects(), 2);
    }
}
