"""Extended affine Weyl group combinatorics and ADLV invariants."""
