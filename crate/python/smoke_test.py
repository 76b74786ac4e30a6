"""Quick end-to-end check of the Python bindings.

Build first:  cd crates/py && maturin develop --release
"""

import contcalc


def main():
    b = contcalc.Groupoid.bz(2)
    assert (b.num_objects, b.num_morphisms) == (1, 2)
    assert not b.is_isolated(0)
    assert all(contcalc.Groupoid.disc(3).is_isolated(a) for a in range(3))

    f = contcalc.Container.discrete(["x"], [[0, 1, 2]])
    g = contcalc.Container.parse("container g (x) over {x}\nshape a { x: 2; }\nshape b { x: 3; }\n")
    d = f.derivative()
    assert d.num_shapes == 3 and sorted(d.sizes("x")) == [0, 1, 1]
    assert contcalc.check_sum(f, g)["holds"]
    assert contcalc.check_leibniz(f, g)["holds"]
    assert contcalc.hom_count(f, g) == 0
    assert contcalc.hom_count(g, g) == 2 * 6

    chain = contcalc.chain_rule(f, g)
    assert chain["embedding"] and chain["strong"]

    ex = contcalc.counterexample()
    assert ex["domain_shapes"] == 0
    assert ex["codomain_classes_over_identity"] == 1
    assert not ex["strong"]

    bag = contcalc.Container.bag(3).derivative()
    two = contcalc.Container.bag(2)
    orders = sorted(bag.shapes.aut_order(s) for s in range(bag.num_shapes))
    assert bag.shapes.num_components == two.shapes.num_components
    assert set(orders) == {two.shapes.aut_order(s) for s in range(two.num_shapes)}

    rule = contcalc.mu_rule("list2", depth=5)
    assert rule["hole_shapes"] == sum(n * 2**n for n in range(5)) == 98
    assert rule["passed"] and rule["strong"]
    twisted = contcalc.mu_rule("twisted", depth=3)
    assert twisted["flags_agree"] and not twisted["strong"]

    z = contcalc.zipper("list", "cons[cons[nil]]", "0.@0")
    assert len(z["layers"]) == 1 and z["hole"] is not None

    text = f.to_dsl("f")
    assert contcalc.Container.parse(text).sizes("x") == [0, 1, 2]

    print("smoke test passed")


if __name__ == "__main__":
    main()
