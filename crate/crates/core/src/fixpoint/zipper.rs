//! One-hole contexts in W-trees.
//!
//! A zipper is the list of layers from the root down to a focused subtree.
//! With a hole, it also names a parameter position of the focus root: these
//! are the values of `μF'`, and `fill` turns them into a tree with a path.

use serde::Serialize;

use super::{Signature, WPath, WTree};
use crate::error::{Error, Result};

/// A parameter position of the focus root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Hole {
    /// Parameter ordinal.
    pub index: usize,
    pub position: usize,
}

/// A node on the way down, missing the child at recursive position `hole`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Layer {
    pub shape: usize,
    pub hole: usize,
    pub siblings: Vec<WTree>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ZipperValue {
    /// Root first.
    pub layers: Vec<Layer>,
    pub focus: WTree,
    pub hole: Option<Hole>,
}

impl ZipperValue {
    /// A hole-free zipper focused on the root of `w`.
    pub fn root(w: WTree) -> Self {
        ZipperValue {
            layers: Vec::new(),
            focus: w,
            hole: None,
        }
    }

    pub fn render(&self, sig: &Signature) -> String {
        let mut out = String::new();
        for l in &self.layers {
            let mut kids: Vec<String> = l.siblings.iter().map(|c| sig.render(c)).collect();
            kids.insert(l.hole.min(kids.len()), "_".into());
            out.push_str(&format!("{}[{}] / ", sig.shape_name(l.shape), kids.join(", ")));
        }
        out.push_str(&sig.render(&self.focus));
        if let Some(h) = &self.hole {
            out.push_str(&format!(" @{}:{}", sig.params()[h.index], h.position));
        }
        out
    }
}

fn check_layer(sig: &Signature, l: &Layer) -> Result<()> {
    if l.shape >= sig.num_shapes() {
        return Err(Error::UnknownShape(l.shape.to_string()));
    }
    let n = sig.arity(l.shape);
    if l.hole >= n || l.siblings.len() + 1 != n {
        return Err(Error::ArityMismatch(format!(
            "layer `{}` has {} recursive positions, got hole {} with {} siblings",
            sig.shape_name(l.shape),
            n,
            l.hole,
            l.siblings.len()
        )));
    }
    l.siblings.iter().try_for_each(|c| sig.check_tree(c))
}

fn check(sig: &Signature, z: &ZipperValue) -> Result<()> {
    z.layers.iter().try_for_each(|l| check_layer(sig, l))?;
    sig.check_tree(&z.focus)?;
    if let Some(h) = &z.hole {
        if h.index >= sig.params().len() || h.position >= sig.positions(h.index, z.focus.shape) {
            return Err(Error::Precondition(format!(
                "no position {} at parameter {} of `{}`",
                h.position,
                h.index,
                sig.shape_name(z.focus.shape)
            )));
        }
    }
    Ok(())
}

fn wrap(l: &Layer, child: WTree) -> WTree {
    let mut kids = l.siblings.clone();
    kids.insert(l.hole, child);
    WTree::new(l.shape, kids)
}

/// The node of `w` holding the final position of `p`.
pub fn subtree_at<'a>(w: &'a WTree, p: &WPath) -> Option<&'a WTree> {
    let (steps, _) = p.steps();
    steps.iter().try_fold(w, |t, &b| t.children.get(b))
}

/// The zipper for the position `p` at parameter `i` of `w`.
pub fn decompose(sig: &Signature, i: &str, w: &WTree, p: &WPath) -> Result<ZipperValue> {
    let index = sig.param_ordinal(i)?;
    sig.check_tree(w)?;
    let (steps, position) = p.steps();
    let mut layers = Vec::with_capacity(steps.len());
    let mut t = w;
    for b in steps {
        let child = t
            .children
            .get(b)
            .ok_or_else(|| Error::Precondition(format!("path `{p}` leaves the tree")))?;
        let mut siblings = t.children.clone();
        siblings.remove(b);
        layers.push(Layer {
            shape: t.shape,
            hole: b,
            siblings,
        });
        t = child;
    }
    if position >= sig.positions(index, t.shape) {
        return Err(Error::Precondition(format!("path `{p}` names no position at `{i}`")));
    }
    Ok(ZipperValue {
        layers,
        focus: t.clone(),
        hole: Some(Hole { index, position }),
    })
}

/// The tree and path a holed zipper stands for.
pub fn fill(sig: &Signature, z: &ZipperValue) -> Result<(WTree, WPath)> {
    check(sig, z)?;
    let h = z
        .hole
        .as_ref()
        .ok_or_else(|| Error::Precondition("the zipper has no hole".into()))?;
    let steps: Vec<usize> = z.layers.iter().map(|l| l.hole).collect();
    let w = z.layers.iter().rev().fold(z.focus.clone(), |acc, l| wrap(l, acc));
    Ok((w, WPath::from_steps(&steps, h.position)))
}

/// Replace the focus of a hole-free zipper and rebuild the whole tree.
pub fn plug(sig: &Signature, z: &ZipperValue, filler: WTree) -> Result<WTree> {
    if z.hole.is_some() {
        return Err(Error::Precondition("plug takes a hole-free zipper".into()));
    }
    let z = ZipperValue {
        focus: filler,
        ..z.clone()
    };
    check(sig, &z)?;
    Ok(z.layers.iter().rev().fold(z.focus, |acc, l| wrap(l, acc)))
}

/// Move the focus to its parent; `None` at the root. A hole does not
/// survive the move.
pub fn up(sig: &Signature, z: &ZipperValue) -> Result<Option<ZipperValue>> {
    check(sig, z)?;
    let Some((last, rest)) = z.layers.split_last() else {
        return Ok(None);
    };
    Ok(Some(ZipperValue {
        layers: rest.to_vec(),
        focus: wrap(last, z.focus.clone()),
        hole: None,
    }))
}

/// Move the focus to the child at recursive position `b`.
pub fn down(sig: &Signature, z: &ZipperValue, b: usize) -> Result<ZipperValue> {
    check(sig, z)?;
    let child = z.focus.children.get(b).cloned().ok_or_else(|| {
        Error::ArityMismatch(format!(
            "`{}` has no recursive position {b}",
            sig.shape_name(z.focus.shape)
        ))
    })?;
    let mut siblings = z.focus.children.clone();
    siblings.remove(b);
    let mut layers = z.layers.clone();
    layers.push(Layer {
        shape: z.focus.shape,
        hole: b,
        siblings,
    });
    Ok(ZipperValue {
        layers,
        focus: child,
        hole: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixpoint::{enumerate_wtrees, wpaths};
    use crate::limits::Limits;

    #[test]
    fn list_decomposition() {
        let sig = Signature::list(3);
        let w = sig.parse_tree("a[b[c[nil]]]").unwrap();
        let z = decompose(&sig, "x", &w, &WPath::parse("0.@0").unwrap()).unwrap();
        assert_eq!(z.layers.len(), 1);
        assert_eq!(sig.shape_name(z.layers[0].shape), "a");
        assert_eq!(sig.render(&z.focus), "b[c[nil]]");
        assert_eq!(fill(&sig, &z).unwrap(), (w, WPath::parse("0.@0").unwrap()));
    }

    #[test]
    fn every_hole_round_trips() {
        for sig in [Signature::list(2), Signature::binary_tree()] {
            for w in enumerate_wtrees(&sig, 3, &Limits::default()).unwrap() {
                for p in wpaths(&sig, "x", &w).unwrap() {
                    let z = decompose(&sig, "x", &w, &p).unwrap();
                    assert_eq!(subtree_at(&w, &p), Some(&z.focus));
                    assert_eq!(fill(&sig, &z).unwrap(), (w.clone(), p));
                }
            }
        }
    }

    #[test]
    fn navigation() {
        let sig = Signature::binary_tree();
        let w = sig.parse_tree("node[node[leaf, leaf], leaf]").unwrap();
        let z = ZipperValue::root(w.clone());
        let d = down(&sig, &down(&sig, &z, 0).unwrap(), 1).unwrap();
        assert_eq!(sig.render(&d.focus), "leaf");
        let back = up(&sig, &up(&sig, &d).unwrap().unwrap()).unwrap().unwrap();
        assert_eq!(back, z);
        assert!(up(&sig, &z).unwrap().is_none());
        let grown = plug(&sig, &d, sig.parse_tree("node[leaf, leaf]").unwrap()).unwrap();
        assert_eq!(sig.render(&grown), "node[node[leaf, node[leaf, leaf]], leaf]");
        assert!(down(&sig, &d, 0).is_err());
        assert!(plug(&sig, &d, sig.parse_tree("node[leaf, leaf]").unwrap().children[0].clone()).is_ok());
    }
}
