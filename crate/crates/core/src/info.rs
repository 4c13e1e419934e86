// SPDX-License-Identifier: Apache-2.0

//! Binary entropy and mutual information of small discrete joints, in bits.

/// `h(p) = -p log2 p - (1-p) log2 (1-p)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// Mutual information `I(A;B)` of a 2x2 joint `joint[a][b]`.
pub fn mutual_information(joint: &[[f64; 2]; 2]) -> f64 {
    let pa = [joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]];
    let pb = [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]];
    let h_a = -(plogp(pa[0]) + plogp(pa[1]));
    let h_b = -(plogp(pb[0]) + plogp(pb[1]));
    let h_ab = -joint.iter().flatten().map(|&p| plogp(p)).sum::<f64>();
    (h_a + h_b - h_ab).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.1) - 0.4689955935892812).abs() < 1e-15);
        assert!((binary_entropy(0.25) - 0.8112781244591328).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_of_bsc() {
        let e = 0.1;
        let joint = [[0.5 * (1.0 - e), 0.5 * e], [0.5 * e, 0.5 * (1.0 - e)]];
        assert!((mutual_information(&joint) - (1.0 - binary_entropy(e))).abs() < 1e-14);
        let independent = [[0.12, 0.28], [0.18, 0.42]];
        assert!(mutual_information(&independent) < 1e-14);
        assert!((mutual_information(&[[0.5, 0.0], [0.0, 0.5]]) - 1.0).abs() < 1e-15);
    }
}
