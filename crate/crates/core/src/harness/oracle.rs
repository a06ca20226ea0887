use crate::mechanism::{argmax_tiebreak, MechanismOutcome};

/// Textbook VCG with Clarke pivot payments on a quasi-linear value matrix
/// (`values[i][a]`), ties broken by `tiebreak`.
pub fn classical_vcg_oracle(values: &[Vec<f64>], tiebreak: &[usize]) -> MechanismOutcome {
    let m = tiebreak.len();
    let welfare = |skip: Option<usize>| -> Vec<f64> {
        (0..m)
            .map(|a| {
                values
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| Some(*j) != skip)
                    .map(|(_, row)| row[a])
                    .sum()
            })
            .collect()
    };
    let chosen = argmax_tiebreak(&welfare(None), tiebreak);
    let payments = (0..values.len())
        .map(|i| {
            let others = welfare(Some(i));
            let pivot = argmax_tiebreak(&others, tiebreak);
            others[pivot] - others[chosen]
        })
        .collect();
    MechanismOutcome { chosen, payments }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clarke_payments_by_hand() {
        let out = classical_vcg_oracle(&[vec![4.0, 1.0, 0.0], vec![0.0, 2.0, 1.0]], &[0, 1, 2]);
        assert_eq!(out, MechanismOutcome { chosen: 0, payments: vec![2.0, 0.0] });
    }

    #[test]
    fn lone_agent_pays_nothing() {
        let out = classical_vcg_oracle(&[vec![1.0, 5.0]], &[0, 1]);
        assert_eq!(out, MechanismOutcome { chosen: 1, payments: vec![0.0] });
    }

    #[test]
    fn all_equal_values_use_tiebreak() {
        let v = vec![vec![2.0; 3], vec![2.0; 3]];
        assert_eq!(classical_vcg_oracle(&v, &[2, 0, 1]), MechanismOutcome { chosen: 2, payments: vec![0.0, 0.0] });
    }
}
