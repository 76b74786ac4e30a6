use std::collections::VecDeque;

use super::FinGroupoid;

/// A finite group as a multiplication table; element 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    pub mul: Vec<Vec<usize>>,
}

impl CayleyTable {
    /// Automorphism group of `a` in `g`.
    pub fn automorphisms(g: &FinGroupoid, a: usize) -> Self {
        let mut elems: Vec<usize> = g.hom(a, a).to_vec();
        let id = g.identity(a);
        elems.retain(|&f| f != id);
        elems.insert(0, id);
        let pos = |f: usize| elems.iter().position(|&x| x == f).expect("closed");
        let mul = elems
            .iter()
            .map(|&x| elems.iter().map(|&y| pos(g.compose(x, y))).collect())
            .collect();
        CayleyTable { mul }
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul[y][x];
            k += 1;
        }
        k
    }

    fn order_histogram(&self) -> Vec<usize> {
        let mut hist = vec![0; self.order() + 1];
        for x in 0..self.order() {
            hist[self.element_order(x)] += 1;
        }
        hist
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|x| (0..n).all(|y| self.mul[x][y] == self.mul[y][x]))
    }

    /// Short human-readable name for small groups.
    pub fn describe(&self) -> String {
        let n = self.order();
        if n == 1 {
            return "trivial".into();
        }
        if (0..n).any(|x| self.element_order(x) == n) {
            return format!("Z{n}");
        }
        match (n, self.is_abelian()) {
            (4, true) => "Z2xZ2".into(),
            (6, false) => "S3".into(),
            (8, false) => {
                if self.order_histogram()[4] == 2 {
                    "D4".into()
                } else {
                    "Q8".into()
                }
            }
            (24, false) if self.order_histogram()[4] == 6 && self.order_histogram()[3] == 8 => {
                "S4".into()
            }
            _ => format!("G{n}"),
        }
    }

    fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul[x][g];
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut covered = self.closure(&gens);
        // prefer elements of large order
        let mut candidates: Vec<usize> = (1..self.order()).collect();
        candidates.sort_by_key(|&x| std::cmp::Reverse(self.element_order(x)));
        for x in candidates {
            if !covered[x] {
                gens.push(x);
                covered = self.closure(&gens);
            }
        }
        gens
    }
}

/// Decides group isomorphism by backtracking over images of a generating
/// set, each extended to a homomorphism along the Cayley graph.
pub fn groups_isomorphic(g: &CayleyTable, h: &CayleyTable) -> bool {
    if g.order() != h.order() || g.order_histogram() != h.order_histogram() {
        return false;
    }
    let gens = g.generators();
    let gen_orders: Vec<usize> = gens.iter().map(|&x| g.element_order(x)).collect();
    let mut images = vec![0; gens.len()];

    fn extend(g: &CayleyTable, h: &CayleyTable, gens: &[usize], images: &[usize]) -> bool {
        let n = g.order();
        let mut phi = vec![usize::MAX; n];
        phi[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for (i, &s) in gens.iter().enumerate() {
                let y = g.mul[x][s];
                let img = h.mul[phi[x]][images[i]];
                if phi[y] == usize::MAX {
                    phi[y] = img;
                    queue.push_back(y);
                } else if phi[y] != img {
                    return false;
                }
            }
        }
        let mut hit = vec![false; n];
        for &p in &phi {
            if p == usize::MAX || std::mem::replace(&mut hit[p], true) {
                return false;
            }
        }
        (0..n).all(|x| (0..n).all(|y| phi[g.mul[x][y]] == h.mul[phi[x]][phi[y]]))
    }

    fn search(
        k: usize,
        g: &CayleyTable,
        h: &CayleyTable,
        gens: &[usize],
        gen_orders: &[usize],
        images: &mut Vec<usize>,
    ) -> bool {
        if k == gens.len() {
            return extend(g, h, gens, images);
        }
        for y in 0..h.order() {
            if h.element_order(y) == gen_orders[k] && !images[..k].contains(&y) {
                images[k] = y;
                if search(k + 1, g, h, gens, gen_orders, images) {
                    return true;
                }
            }
        }
        false
    }

    search(0, g, h, &gens, &gen_orders, &mut images)
}

/// Automorphism groups of one representative per component. Two finite
/// groupoids are equivalent exactly when these multisets agree up to group
/// isomorphism.
#[derive(Debug, Clone)]
pub struct GroupoidInvariant {
    pub groups: Vec<CayleyTable>,
}

impl GroupoidInvariant {
    fn signature(g: &CayleyTable) -> (usize, Vec<usize>) {
        (g.order(), g.order_histogram())
    }

    pub fn num_components(&self) -> usize {
        self.groups.len()
    }

    /// Group names, sorted.
    pub fn describe(&self) -> Vec<String> {
        let mut sorted: Vec<&CayleyTable> = self.groups.iter().collect();
        sorted.sort_by_key(|g| Self::signature(g));
        sorted.iter().map(|g| g.describe()).collect()
    }

    pub fn orders(&self) -> Vec<usize> {
        let mut o: Vec<usize> = self.groups.iter().map(|g| g.order()).collect();
        o.sort_unstable();
        o
    }
}

impl PartialEq for GroupoidInvariant {
    fn eq(&self, other: &Self) -> bool {
        if self.groups.len() != other.groups.len() {
            return false;
        }
        let mut a: Vec<&CayleyTable> = self.groups.iter().collect();
        let mut b: Vec<&CayleyTable> = other.groups.iter().collect();
        a.sort_by_key(|g| Self::signature(g));
        b.sort_by_key(|g| Self::signature(g));
        if a.iter().map(|g| Self::signature(g)).ne(b.iter().map(|g| Self::signature(g))) {
            return false;
        }
        // isomorphism is an equivalence relation, so greedy matching inside
        // each signature bucket is exact
        let mut used = vec![false; b.len()];
        for x in &a {
            let sig = Self::signature(x);
            let found = b.iter().enumerate().position(|(j, y)| {
                !used[j] && Self::signature(y) == sig && groups_isomorphic(x, y)
            });
            match found {
                Some(j) => used[j] = true,
                None => return false,
            }
        }
        true
    }
}

pub fn equiv_invariant(g: &FinGroupoid) -> GroupoidInvariant {
    let groups = g
        .components()
        .iter()
        .map(|c| CayleyTable::automorphisms(g, c[0]))
        .collect();
    GroupoidInvariant { groups }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::*;

    #[test]
    fn named_invariants() {
        assert_eq!(equiv_invariant(&bz2()).describe(), vec!["Z2"]);
        assert_eq!(equiv_invariant(&codisc(3)).describe(), vec!["trivial"]);
        assert_eq!(
            equiv_invariant(&bag_shapes(3)).describe(),
            vec!["trivial", "trivial", "Z2", "S3"]
        );
    }

    #[test]
    fn z2_action_matches_codisc2() {
        let a = action(&PermGroup::cyclic(2));
        assert_eq!(equiv_invariant(&a), equiv_invariant(&codisc(2)));
        assert_ne!(equiv_invariant(&a), equiv_invariant(&disc(2)));
    }

    #[test]
    fn z4_vs_klein() {
        let z4 = equiv_invariant(&bz(4));
        let klein = equiv_invariant(&product(&bz2(), &bz2()));
        assert_ne!(z4, klein);
        assert_eq!(klein.describe(), vec!["Z2xZ2"]);
    }

    #[test]
    fn s3_vs_z6() {
        assert_ne!(equiv_invariant(&bsym(3)), equiv_invariant(&bz(6)));
        let s3_action = action(&PermGroup::symmetric(3));
        // stabilizer of a point in S3 is Z2
        assert_eq!(equiv_invariant(&s3_action), equiv_invariant(&bz2()));
    }

    #[test]
    fn s4_named_and_self_isomorphic() {
        let s4 = equiv_invariant(&bsym(4));
        assert_eq!(s4.describe(), vec!["S4"]);
        assert_eq!(s4, equiv_invariant(&bsym(4)));
    }

    #[test]
    fn relabeled_group_is_isomorphic() {
        let g = bsym(3);
        let perm_m: Vec<usize> = (0..6).rev().collect();
        let h = g.permuted(&[0], &perm_m);
        assert!(h.validate().is_valid());
        assert_eq!(equiv_invariant(&g), equiv_invariant(&h));
    }
}
