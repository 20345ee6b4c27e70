use std::sync::Arc;

use super::{PcGroup, Subgroup};

/// Nontrivial terms `gamma_1 = G > gamma_2 > ...` of the lower central series.
pub fn lower_central_series(g: &Arc<PcGroup>) -> Vec<Subgroup> {
    let whole = Subgroup::whole(g);
    let mut terms = Vec::new();
    let mut cur = whole.clone();
    while !cur.is_trivial() {
        let next = cur.commutator(&whole).expect("same group");
        if next == cur {
            // not nilpotent; cannot happen for a finite p-group
            break;
        }
        terms.push(cur);
        cur = next;
    }
    terms
}

/// Nontrivial terms of the exponent-p central series
/// `eta_1 = G`, `eta_{i+1} = [eta_i, G] eta_i^p`.
pub fn exponent_p_central_series(g: &Arc<PcGroup>) -> Vec<Subgroup> {
    let whole = Subgroup::whole(g);
    let mut terms = Vec::new();
    let mut cur = whole.clone();
    while !cur.is_trivial() {
        let comm = cur.commutator(&whole).expect("same group");
        let next = comm.join(&cur.power_closure()).expect("same group");
        if next == cur {
            break;
        }
        terms.push(cur);
        cur = next;
    }
    terms
}

/// Number of nontrivial terms of the exponent-p central series.
pub fn p_class(g: &Arc<PcGroup>) -> usize {
    exponent_p_central_series(g).len()
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn lcs_of_ut5() {
        let g = ut_group(5, 3).unwrap();
        let orders: Vec<usize> = lower_central_series(&g).iter().map(Subgroup::order_log).collect();
        assert_eq!(orders, vec![10, 6, 3, 1]);
        // gamma_i is spanned by the generators on superdiagonals >= i
        let o = UtOracle::new(5, 3);
        for (i, term) in lower_central_series(&g).iter().enumerate() {
            let expected: Vec<usize> = (i + 1..5).flat_map(|l| o.level_generators(l)).collect();
            assert_eq!(term.depths(), expected);
        }
    }

    #[test]
    fn abelian_and_elementary_abelian() {
        let pres = PcPresentation::trivial(5, 3).unwrap();
        let g = PcGroup::new(pres);
        assert_eq!(lower_central_series(&g).len(), 1);
        assert_eq!(exponent_p_central_series(&g).len(), 1);
    }

    #[test]
    fn elgo_lcs() {
        let g = elgo_group(3).unwrap();
        let orders: Vec<usize> = lower_central_series(&g).iter().map(Subgroup::order_log).collect();
        assert_eq!(orders, vec![13, 3]);
    }

    #[test]
    fn epcs_layers_are_elementary_abelian() {
        let g = ut_group(5, 2).unwrap();
        let eta = exponent_p_central_series(&g);
        for w in eta.windows(2) {
            for x in w[0].igs() {
                assert!(w[1].contains(&g.pow(x, 2)));
            }
        }
        // UT(5,2) has exponent 8 and class 4; p-class is 4 as well
        assert_eq!(eta.len(), 4);
    }
}
