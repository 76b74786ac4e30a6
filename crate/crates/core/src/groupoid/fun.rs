use std::collections::HashMap;
use std::sync::Arc;

use super::{natisos, FinGroupoid, GFunctor, Morphism};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// The groupoid of functors `A -> B` and natural isomorphisms.
#[derive(Debug, Clone)]
pub struct FunGroupoid {
    pub groupoid: Arc<FinGroupoid>,
    pub source: Arc<FinGroupoid>,
    pub target: Arc<FinGroupoid>,
    pub functors: Vec<GFunctor>,
    /// Per morphism: (from, to, components).
    pub transformations: Vec<(usize, usize, Vec<usize>)>,
    lookup: HashMap<(Vec<usize>, Vec<usize>), usize>,
    trans_lookup: HashMap<(usize, usize, Vec<usize>), usize>,
}

impl FunGroupoid {
    /// Index of the functor with the given tables.
    pub fn functor_index(&self, obj_map: &[usize], mor_map: &[usize]) -> Option<usize> {
        self.lookup
            .get(&(obj_map.to_vec(), mor_map.to_vec()))
            .copied()
    }

    pub fn transformation_index(&self, from: usize, to: usize, components: &[usize]) -> Option<usize> {
        self.trans_lookup
            .get(&(from, to, components.to_vec()))
            .copied()
    }
}

/// All functors `A -> B` by backtracking over morphism images, in
/// lexicographic order of morphism images.
pub fn enumerate_functors(a: &Arc<FinGroupoid>, b: &Arc<FinGroupoid>, limits: &Limits) -> Result<Vec<GFunctor>> {
    let (sa, sb) = (&**a, &**b);
    let n = sa.num_objects();
    let m = sa.num_morphisms();
    let mut out = Vec::new();
    let mut obj = vec![usize::MAX; n];
    let mut mor = vec![usize::MAX; m];
    // Assign morphisms in order of their source's first appearance so that
    // object images are fixed by identities first.
    let mut order: Vec<usize> = (0..n).map(|x| sa.identity(x)).collect();
    order.extend((0..m).filter(|&f| !sa.is_identity(f)));

    #[allow(clippy::too_many_arguments)]
    fn go(
        k: usize,
        order: &[usize],
        sa: &FinGroupoid,
        sb: &FinGroupoid,
        obj: &mut Vec<usize>,
        mor: &mut Vec<usize>,
        out: &mut Vec<GFunctor>,
        a: &Arc<FinGroupoid>,
        b: &Arc<FinGroupoid>,
        limits: &Limits,
    ) -> Result<()> {
        if k == order.len() {
            limits.check_cells("functor enumeration", out.len() + 1)?;
            out.push(GFunctor::new_unchecked(a.clone(), b.clone(), obj.clone(), mor.clone()));
            return Ok(());
        }
        let f = order[k];
        if sa.is_identity(f) {
            let x = sa.src(f);
            for y in 0..sb.num_objects() {
                obj[x] = y;
                mor[f] = sb.identity(y);
                go(k + 1, order, sa, sb, obj, mor, out, a, b, limits)?;
            }
            obj[x] = usize::MAX;
            mor[f] = usize::MAX;
            return Ok(());
        }
        let (s, d) = (obj[sa.src(f)], obj[sa.dst(f)]);
        let candidates: Vec<usize> = sb.hom(s, d).to_vec();
        for g in candidates {
            mor[f] = g;
            if consistent(f, sa, sb, mor) {
                go(k + 1, order, sa, sb, obj, mor, out, a, b, limits)?;
            }
        }
        mor[f] = usize::MAX;
        Ok(())
    }

    fn consistent(f: usize, sa: &FinGroupoid, sb: &FinGroupoid, mor: &[usize]) -> bool {
        let assigned = |x: usize| mor[x] != usize::MAX;
        // f as either factor or as the composite
        for &h in sa.out(sa.dst(f)) {
            if assigned(h) {
                let hf = sa.compose(h, f);
                if assigned(hf) && sb.compose(mor[h], mor[f]) != mor[hf] {
                    return false;
                }
            }
        }
        for g in 0..sa.num_morphisms() {
            if sa.dst(g) == sa.src(f) && assigned(g) {
                let fg = sa.compose(f, g);
                if assigned(fg) && sb.compose(mor[f], mor[g]) != mor[fg] {
                    return false;
                }
            }
        }
        for g in 0..sa.num_morphisms() {
            if sa.src(g) == sa.src(f) && assigned(g) && g != f {
                // f = h ∘ g with h = f ∘ g^-1
                let h = sa.compose(f, sa.inverse(g));
                if assigned(h) && sb.compose(mor[h], mor[g]) != mor[f] {
                    return false;
                }
            }
        }
        true
    }

    go(0, &order, sa, sb, &mut obj, &mut mor, &mut out, a, b, limits)?;
    Ok(out)
}

/// `Fun(A, B)`. The source must have at most
/// `limits.max_fun_source_objects` objects unless it is discrete.
pub fn fun_groupoid(a: &Arc<FinGroupoid>, b: &Arc<FinGroupoid>, limits: &Limits) -> Result<FunGroupoid> {
    if !a.is_discrete() && a.num_objects() > limits.max_fun_source_objects {
        return Err(Error::SizeLimit {
            what: "functor groupoid source objects".into(),
            actual: a.num_objects(),
            limit: limits.max_fun_source_objects,
        });
    }
    let functors = enumerate_functors(a, b, limits)?;
    let lookup: HashMap<(Vec<usize>, Vec<usize>), usize> = functors
        .iter()
        .enumerate()
        .map(|(i, f)| ((f.obj_map.clone(), f.mor_map.clone()), i))
        .collect();
    let objects: Vec<String> = functors.iter().map(functor_name).collect();
    let mut transformations = Vec::new();
    let mut cells = 0usize;
    // natural isomorphisms need pointwise isomorphic images
    let labels = b.component_labels();
    for (i, f) in functors.iter().enumerate() {
        for (j, g) in functors.iter().enumerate() {
            if f.obj_map
                .iter()
                .zip(&g.obj_map)
                .any(|(&x, &y)| labels[x] != labels[y])
            {
                continue;
            }
            for comps in natisos(f, g) {
                cells += 1;
                limits.check_cells("functor groupoid morphisms", cells)?;
                transformations.push((i, j, comps));
            }
        }
    }
    let trans_lookup: HashMap<(usize, usize, Vec<usize>), usize> = transformations
        .iter()
        .enumerate()
        .map(|(k, (i, j, c))| ((*i, *j, c.clone()), k))
        .collect();
    let morphisms = transformations
        .iter()
        .map(|(i, j, c)| Morphism {
            name: format!(
                "{}=>{}[{}]",
                i,
                j,
                c.iter().map(|&m| b.morphism_name(m)).collect::<Vec<_>>().join(",")
            ),
            src: *i,
            dst: *j,
        })
        .collect();
    let identity = (0..functors.len())
        .map(|i| {
            let c: Vec<usize> = functors[i].obj_map.iter().map(|&y| b.identity(y)).collect();
            trans_lookup[&(i, i, c)]
        })
        .collect();
    let inverse = transformations
        .iter()
        .map(|(i, j, c)| {
            let inv: Vec<usize> = c.iter().map(|&m| b.inverse(m)).collect();
            trans_lookup[&(*j, *i, inv)]
        })
        .collect();
    let groupoid = FinGroupoid::generate(objects, morphisms, identity, inverse, |h, k| {
        let (i, _, c1) = &transformations[k];
        let (_, l, c2) = &transformations[h];
        let c: Vec<usize> = c1.iter().zip(c2).map(|(&x, &y)| b.compose(y, x)).collect();
        trans_lookup[&(*i, *l, c)]
    });
    Ok(FunGroupoid {
        groupoid: Arc::new(groupoid),
        source: a.clone(),
        target: b.clone(),
        functors,
        transformations,
        lookup,
        trans_lookup,
    })
}

fn functor_name(f: &GFunctor) -> String {
    let parts: Vec<String> = (0..f.source.num_objects())
        .map(|x| f.target.object_name(f.obj(x)).to_string())
        .collect();
    let mors: Vec<String> = (0..f.source.num_morphisms())
        .filter(|&m| !f.source.is_identity(m))
        .map(|m| f.target.morphism_name(f.mor(m)).to_string())
        .collect();
    if mors.is_empty() {
        format!("<{}>", parts.join(","))
    } else {
        format!("<{}|{}>", parts.join(","), mors.join(","))
    }
}
