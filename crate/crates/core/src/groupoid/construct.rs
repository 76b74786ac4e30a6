use std::collections::HashMap;
use std::sync::Arc;

use super::{FinGroupoid, GFunctor, Morphism};
use crate::error::{Error, Result};

fn mor(name: String, src: usize, dst: usize) -> Morphism {
    Morphism { name, src, dst }
}

/// Discrete groupoid on `n` objects named `0..n`.
pub fn disc(n: usize) -> FinGroupoid {
    disc_named((0..n).map(|i| i.to_string()).collect())
}

pub fn disc_named(objects: Vec<String>) -> FinGroupoid {
    let morphisms = objects
        .iter()
        .enumerate()
        .map(|(i, o)| mor(format!("id_{o}"), i, i))
        .collect();
    let n = objects.len();
    FinGroupoid::generate(
        objects,
        morphisms,
        (0..n).collect(),
        (0..n).collect(),
        |g, _| g,
    )
}

pub fn unit() -> FinGroupoid {
    disc_named(vec!["*".to_string()])
}

/// Codiscrete groupoid: exactly one morphism between any two of `n` objects.
pub fn codisc(n: usize) -> FinGroupoid {
    let objects: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut morphisms = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let name = if a == b {
                format!("id_{a}")
            } else {
                format!("{a}>{b}")
            };
            morphisms.push(mor(name, a, b));
        }
    }
    let identity = (0..n).map(|a| a * n + a).collect();
    let inverse = (0..n * n).map(|f| (f % n) * n + f / n).collect();
    FinGroupoid::generate(objects, morphisms, identity, inverse, |g, f| {
        (f / n) * n + g % n
    })
}

/// A finite group given by permutations of `0..degree`, closed under
/// composition. Element 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermGroup {
    pub degree: usize,
    pub elements: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl PermGroup {
    /// Closure of `generators` under composition.
    pub fn generated(degree: usize, generators: &[Vec<usize>]) -> Result<Self> {
        for g in generators {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&x| x >= degree || std::mem::replace(&mut seen[x], true)) {
                return Err(Error::Unsupported(format!("{g:?} is not a permutation of {degree} points")));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < elements.len() {
            for g in generators {
                let next = compose_perm(g, &elements[i]);
                if !index.contains_key(&next) {
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                }
            }
            i += 1;
        }
        Ok(PermGroup {
            degree,
            elements,
            index,
        })
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn symmetric(n: usize) -> Self {
        let mut elements = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            elements.push(cur.clone());
            if !next_permutation(&mut cur) {
                break;
            }
        }
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        PermGroup {
            degree: n,
            elements,
            index,
        }
    }

    pub fn cyclic(n: usize) -> Self {
        let gen: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Self::generated(n, &[gen]).expect("rotation is a permutation")
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, p: &[usize]) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Index of `elements[g] ∘ elements[f]`.
    pub fn mul(&self, g: usize, f: usize) -> usize {
        self.index[&compose_perm(&self.elements[g], &self.elements[f])]
    }

    pub fn inv(&self, g: usize) -> usize {
        let p = &self.elements[g];
        let mut q = vec![0; p.len()];
        for (i, &x) in p.iter().enumerate() {
            q[x] = i;
        }
        self.index[&q]
    }

    pub fn element_name(&self, g: usize) -> String {
        let p = &self.elements[g];
        let body: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        format!("[{}]", body.join(","))
    }
}

/// `(g∘f)(i) = g(f(i))`
pub fn compose_perm(g: &[usize], f: &[usize]) -> Vec<usize> {
    f.iter().map(|&i| g[i]).collect()
}

pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// One-object groupoid of a permutation group, named with `names`.
pub fn delooping(group: &PermGroup, names: impl Fn(usize) -> String) -> FinGroupoid {
    let morphisms = (0..group.order()).map(|g| mor(names(g), 0, 0)).collect();
    let inverse = (0..group.order()).map(|g| group.inv(g)).collect();
    FinGroupoid::generate(
        vec!["*".to_string()],
        morphisms,
        vec![0],
        inverse,
        |g, f| group.mul(g, f),
    )
}

pub fn bz2() -> FinGroupoid {
    let g = PermGroup::cyclic(2);
    delooping(&g, |i| if i == 0 { "e".into() } else { "σ".into() })
}

pub fn bz(n: usize) -> FinGroupoid {
    let g = PermGroup::cyclic(n);
    delooping(&g, |i| if i == 0 { "e".into() } else { format!("r{i}") })
}

/// Delooping of the symmetric group on `n` letters.
pub fn bsym(n: usize) -> FinGroupoid {
    let g = PermGroup::symmetric(n);
    delooping(&g, |i| g.element_name(i))
}

/// Action groupoid of a permutation group acting on its points: objects are
/// the points, a morphism `g·x : x -> g(x)` for every element and point.
pub fn action(group: &PermGroup) -> FinGroupoid {
    let n = group.degree;
    let k = group.order();
    let objects = (0..n).map(|i| i.to_string()).collect();
    let mut morphisms = Vec::with_capacity(n * k);
    for g in 0..k {
        for x in 0..n {
            morphisms.push(mor(
                format!("{}·{x}", group.element_name(g)),
                x,
                group.elements[g][x],
            ));
        }
    }
    let identity = (0..n).collect();
    let inverse = (0..n * k)
        .map(|f| {
            let (g, x) = (f / n, f % n);
            group.inv(g) * n + group.elements[g][x]
        })
        .collect();
    FinGroupoid::generate(objects, morphisms, identity, inverse, |h, f| {
        group.mul(h / n, f / n) * n + f % n
    })
}

/// `A ⊕ B`. Objects and morphisms of `B` follow those of `A`.
pub fn sum(a: &FinGroupoid, b: &FinGroupoid) -> FinGroupoid {
    sum_many(&[a, b], |i, name| {
        if i == 0 {
            format!("inl({name})")
        } else {
            format!("inr({name})")
        }
    })
}

/// Disjoint union laid out summand by summand. `tag(i, name)` names the
/// copies of objects and morphisms of summand `i`.
pub fn sum_many(parts: &[&FinGroupoid], tag: impl Fn(usize, &str) -> String) -> FinGroupoid {
    let mut objects = Vec::new();
    let mut morphisms = Vec::new();
    let mut identity = Vec::new();
    let mut inverse = Vec::new();
    let mut compose = HashMap::new();
    for (i, g) in parts.iter().enumerate() {
        let (oo, mo) = (objects.len(), morphisms.len());
        objects.extend(g.objects().iter().map(|o| tag(i, o)));
        morphisms.extend(
            g.morphisms()
                .iter()
                .map(|f| mor(tag(i, &f.name), f.src + oo, f.dst + oo)),
        );
        identity.extend((0..g.num_objects()).map(|a| g.identity(a) + mo));
        inverse.extend((0..g.num_morphisms()).map(|f| g.inverse(f) + mo));
        for (&(h, f), &k) in g.compose_table() {
            compose.insert((h + mo, f + mo), k + mo);
        }
    }
    FinGroupoid::assemble(objects, morphisms, identity, inverse, compose)
}

/// `A × B`; object `(a, b)` has index `a * |B| + b`, morphism `(f, g)` has
/// index `f * |mor B| + g`.
pub fn product(a: &FinGroupoid, b: &FinGroupoid) -> FinGroupoid {
    let (nb, mb) = (b.num_objects(), b.num_morphisms());
    let mut objects = Vec::with_capacity(a.num_objects() * nb);
    for x in a.objects() {
        for y in b.objects() {
            objects.push(format!("({x},{y})"));
        }
    }
    let mut morphisms = Vec::with_capacity(a.num_morphisms() * mb);
    for f in a.morphisms() {
        for g in b.morphisms() {
            morphisms.push(mor(
                format!("({},{})", f.name, g.name),
                f.src * nb + g.src,
                f.dst * nb + g.dst,
            ));
        }
    }
    let identity = (0..a.num_objects() * nb)
        .map(|o| a.identity(o / nb) * mb + b.identity(o % nb))
        .collect();
    let inverse = (0..a.num_morphisms() * mb)
        .map(|f| a.inverse(f / mb) * mb + b.inverse(f % mb))
        .collect();
    FinGroupoid::generate(objects, morphisms, identity, inverse, |h, f| {
        a.compose(h / mb, f / mb) * mb + b.compose(h % mb, f % mb)
    })
}

/// A full subgroupoid together with its index translation.
#[derive(Debug, Clone)]
pub struct Subgroupoid {
    pub groupoid: Arc<FinGroupoid>,
    /// `to_sub[a]` is the index of `a` in the subgroupoid, if kept.
    pub to_sub: Vec<Option<usize>>,
    pub from_sub: Vec<usize>,
    pub mor_to_sub: Vec<Option<usize>>,
    pub mor_from_sub: Vec<usize>,
}

impl Subgroupoid {
    pub fn inclusion(&self, ambient: &Arc<FinGroupoid>) -> GFunctor {
        GFunctor::new_unchecked(
            self.groupoid.clone(),
            ambient.clone(),
            self.from_sub.clone(),
            self.mor_from_sub.clone(),
        )
    }
}

/// Full subgroupoid on the objects where `keep` holds.
pub fn full_subgroupoid(g: &FinGroupoid, keep: impl Fn(usize) -> bool) -> Subgroupoid {
    let mut to_sub = vec![None; g.num_objects()];
    let mut from_sub = Vec::new();
    for (a, slot) in to_sub.iter_mut().enumerate() {
        if keep(a) {
            *slot = Some(from_sub.len());
            from_sub.push(a);
        }
    }
    let mut mor_to_sub = vec![None; g.num_morphisms()];
    let mut mor_from_sub = Vec::new();
    let mut morphisms = Vec::new();
    for (f, m) in g.morphisms().iter().enumerate() {
        if let (Some(s), Some(d)) = (to_sub[m.src], to_sub[m.dst]) {
            mor_to_sub[f] = Some(mor_from_sub.len());
            mor_from_sub.push(f);
            morphisms.push(mor(m.name.clone(), s, d));
        }
    }
    let objects = from_sub.iter().map(|&a| g.object_name(a).to_string()).collect();
    let identity = from_sub
        .iter()
        .map(|&a| mor_to_sub[g.identity(a)].expect("identity kept"))
        .collect();
    let inverse = mor_from_sub
        .iter()
        .map(|&f| mor_to_sub[g.inverse(f)].expect("inverse kept"))
        .collect();
    let sub = FinGroupoid::generate(objects, morphisms, identity, inverse, |h, f| {
        mor_to_sub[g.compose(mor_from_sub[h], mor_from_sub[f])].expect("composite kept")
    });
    Subgroupoid {
        groupoid: Arc::new(sub),
        to_sub,
        from_sub,
        mor_to_sub,
        mor_from_sub,
    }
}

/// Groupoid of finite types of size at most `n`: one delooped symmetric
/// group per size.
pub fn bag_shapes(n: usize) -> FinGroupoid {
    let parts: Vec<FinGroupoid> = (0..=n).map(bsym).collect();
    let refs: Vec<&FinGroupoid> = parts.iter().collect();
    sum_many(&refs, |i, name| {
        if name == "*" {
            format!("{i}")
        } else {
            format!("{i}:{name}")
        }
    })
}

/// Named standard groupoids.
///
/// `Disc(n)`, `Codisc(n)`, `BZ2`, `BZ(n)`, `BS(n)`, `Action(n)` (cyclic group
/// acting on `n` points), `SymAction(n)`, `Bag(n)`, `Unit`, `Empty`.
pub fn standard_groupoid(name: &str, params: &[usize]) -> Result<FinGroupoid> {
    let one = |what: &str| -> Result<usize> {
        match params {
            [n] => Ok(*n),
            _ => Err(Error::Unsupported(format!("{what} takes one parameter"))),
        }
    };
    let none = |g: FinGroupoid| -> Result<FinGroupoid> {
        if params.is_empty() {
            Ok(g)
        } else {
            Err(Error::Unsupported(format!("{name} takes no parameters")))
        }
    };
    match name {
        "Disc" => Ok(disc(one(name)?)),
        "Codisc" => Ok(codisc(one(name)?)),
        "BZ2" => none(bz2()),
        "BZ" => {
            let n = one(name)?;
            if n == 0 {
                return Err(Error::Unsupported("BZ(0)".into()));
            }
            Ok(bz(n))
        }
        "BS" => {
            let n = one(name)?;
            if n > 4 {
                return Err(Error::Unsupported("BS(n) requires n <= 4".into()));
            }
            Ok(bsym(n))
        }
        "Action" => {
            let n = one(name)?;
            if n == 0 {
                return Err(Error::Unsupported("Action(0)".into()));
            }
            Ok(action(&PermGroup::cyclic(n)))
        }
        "SymAction" => {
            let n = one(name)?;
            if n > 4 {
                return Err(Error::Unsupported("SymAction(n) requires n <= 4".into()));
            }
            Ok(action(&PermGroup::symmetric(n)))
        }
        "Bag" => {
            let n = one(name)?;
            if n > 4 {
                return Err(Error::Unsupported("Bag(n) requires n <= 4".into()));
            }
            Ok(bag_shapes(n))
        }
        "Unit" => none(unit()),
        "Empty" => none(disc(0)),
        other => Err(Error::Unsupported(format!("unknown groupoid `{other}`"))),
    }
}

/// `f ⊕ g` between sums laid out as by [`sum`].
pub fn sum_functor(
    f: &GFunctor,
    g: &GFunctor,
    source: Arc<FinGroupoid>,
    target: Arc<FinGroupoid>,
) -> GFunctor {
    let (no, mo) = (f.target.num_objects(), f.target.num_morphisms());
    let obj_map = f
        .obj_map
        .iter()
        .copied()
        .chain(g.obj_map.iter().map(|&o| o + no))
        .collect();
    let mor_map = f
        .mor_map
        .iter()
        .copied()
        .chain(g.mor_map.iter().map(|&m| m + mo))
        .collect();
    GFunctor::new_unchecked(source, target, obj_map, mor_map)
}

/// `f × g` between products laid out as by [`product`].
pub fn product_functor(
    f: &GFunctor,
    g: &GFunctor,
    source: Arc<FinGroupoid>,
    target: Arc<FinGroupoid>,
) -> GFunctor {
    let (nb, mb) = (g.target.num_objects(), g.target.num_morphisms());
    let mut obj_map = Vec::with_capacity(f.obj_map.len() * g.obj_map.len());
    for &x in &f.obj_map {
        for &y in &g.obj_map {
            obj_map.push(x * nb + y);
        }
    }
    let mut mor_map = Vec::with_capacity(f.mor_map.len() * g.mor_map.len());
    for &x in &f.mor_map {
        for &y in &g.mor_map {
            mor_map.push(x * mb + y);
        }
    }
    GFunctor::new_unchecked(source, target, obj_map, mor_map)
}

/// Restriction of `f` to full subgroupoids it maps into each other.
/// `None` if some kept object lands outside `target`.
pub fn restrict_functor(f: &GFunctor, source: &Subgroupoid, target: &Subgroupoid) -> Option<GFunctor> {
    let obj_map = source
        .from_sub
        .iter()
        .map(|&a| target.to_sub[f.obj(a)])
        .collect::<Option<Vec<usize>>>()?;
    let mor_map = source
        .mor_from_sub
        .iter()
        .map(|&m| target.mor_to_sub[f.mor(m)])
        .collect::<Option<Vec<usize>>>()?;
    Some(GFunctor::new_unchecked(
        source.groupoid.clone(),
        target.groupoid.clone(),
        obj_map,
        mor_map,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_groupoids_are_valid() {
        for (name, params) in [
            ("Disc", vec![3]),
            ("Codisc", vec![3]),
            ("BZ2", vec![]),
            ("BZ", vec![3]),
            ("BS", vec![3]),
            ("Action", vec![2]),
            ("SymAction", vec![3]),
            ("Bag", vec![3]),
            ("Unit", vec![]),
            ("Empty", vec![]),
        ] {
            let g = standard_groupoid(name, &params).unwrap();
            assert!(g.validate().is_valid(), "{name}");
        }
        assert!(standard_groupoid("Nope", &[]).is_err());
        assert!(standard_groupoid("Disc", &[]).is_err());
    }

    #[test]
    fn z2_action_stabilizers_are_trivial() {
        let g = action(&PermGroup::cyclic(2));
        assert_eq!(g.aut_order(0), 1);
        assert_eq!(g.aut_order(1), 1);
        assert_eq!(g.components().len(), 1);
    }

    #[test]
    fn product_layout() {
        let p = product(&bz2(), &codisc(2));
        assert!(p.validate().is_valid());
        assert_eq!(p.num_objects(), 2);
        assert_eq!(p.num_morphisms(), 8);
        assert_eq!(p.aut_order(1), 2);
    }

    #[test]
    fn symmetric_group_order() {
        assert_eq!(PermGroup::symmetric(4).order(), 24);
        assert_eq!(PermGroup::symmetric(0).order(), 1);
        let g = PermGroup::generated(3, &[vec![1, 0, 2], vec![0, 2, 1]]).unwrap();
        assert_eq!(g.order(), 6);
    }

    #[test]
    fn subgroupoid_keeps_homs() {
        let c = codisc(3);
        let s = full_subgroupoid(&c, |a| a != 1);
        assert_eq!(s.groupoid.num_objects(), 2);
        assert_eq!(s.groupoid.num_morphisms(), 4);
        assert!(s.groupoid.validate().is_valid());
    }
}
