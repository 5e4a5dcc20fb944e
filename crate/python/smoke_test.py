"""Quick check of the Python bindings on the standard fixtures."""

import sphere_taming as st


def main():
    loop = st.Foliation.fixture("LOOP+")
    r = loop.decide()
    assert r["verdict"] == "overtwisted", r
    assert r["certificate"]["kind"] == "polygon"

    eh2 = st.Foliation.fixture("EH2")
    assert eh2.d() == (1, 1)
    phi = dict(eh2.tame())
    assert phi["h1"] == "1/2", phi
    assert eh2.is_taming(phi)
    assert eh2.simplicity(phi)["simple"]
    steps = eh2.extend_to_ball(phi)["steps"]
    assert [s["kind"] for s in steps][-1] == "cap"

    again = st.Foliation.parse(eh2.text())
    assert again == eh2
    assert eh2.reverse().reverse().isomorphic(eh2)
    assert st.Foliation.fixture("NEGH").is_tight()

    small = st.enumerate(1)
    assert len(small) == 5
    assert sum(f.is_tight() for f in small) == sum(f.oracle()["verdict"] == "tight" for f in small)

    try:
        st.Foliation.parse("foliation v1\npoint p1 blob +\n")
    except ValueError as e:
        assert "line 2" in str(e)
    else:
        raise AssertionError("parse error not raised")
    print("smoke test passed")


if __name__ == "__main__":
    main()
