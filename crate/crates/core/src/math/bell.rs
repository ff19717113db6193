//! Partial (incomplete) exponential Bell polynomials.

use super::binomial;
use crate::{Error, Result};

/// Table `t[m][j] = B_{m,j}(x_1, …)` for `0 <= j <= m <= max_m`.
///
/// Built from `B_{m,j} = Σ_{i=1}^{m-j+1} C(m-1, i-1) x_i B_{m-i, j-1}`.
/// Entry `(m, j)` only reads `x_1 … x_{m-j+1}`, so `args` needs `max_m`
/// entries to fill the whole table.
pub fn partial_bell_table(max_m: usize, args: &[f64]) -> Result<Vec<Vec<f64>>> {
    if max_m > 0 && args.len() < max_m {
        return Err(Error::argument(format!(
            "Bell table up to order {max_m} needs {max_m} arguments, got {}",
            args.len()
        )));
    }
    let mut table = vec![vec![0.0; max_m + 1]; max_m + 1];
    table[0][0] = 1.0;
    for m in 1..=max_m {
        for j in 1..=m {
            table[m][j] = (1..=m - j + 1)
                .map(|i| {
                    binomial((m - 1) as u32, (i - 1) as u32) * args[i - 1] * table[m - i][j - 1]
                })
                .sum();
        }
    }
    Ok(table)
}

/// `B_{m,j}(x_1, …, x_{m-j+1})`. `B_{0,0} = 1` and `B_{m,0} = 0` for `m >= 1`.
pub fn partial_bell(m: usize, j: usize, args: &[f64]) -> Result<f64> {
    if j > m {
        return Err(Error::argument(format!(
            "Bell index j = {j} exceeds m = {m}"
        )));
    }
    if m == 0 {
        return Ok(1.0);
    }
    if j == 0 {
        return Ok(0.0);
    }
    let needed = m - j + 1;
    if args.len() < needed {
        return Err(Error::argument(format!(
            "B_{{{m},{j}}} needs {needed} arguments, got {}",
            args.len()
        )));
    }
    // Row j of the recurrence only touches x_1..x_{m-j+1}; pad the rest.
    let mut padded = args[..needed].to_vec();
    padded.resize(m, 0.0);
    Ok(partial_bell_table(m, &padded)?[m][j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute force over set partitions of {0..m-1}: every partition into j
    /// blocks contributes the product of x_{|block|}.
    fn bell_by_partitions(m: usize, j: usize, x: &[f64]) -> f64 {
        fn walk(i: usize, m: usize, j: usize, blocks: &mut Vec<usize>, x: &[f64], acc: &mut f64) {
            if i == m {
                if blocks.len() == j {
                    *acc += blocks.iter().map(|&s| x[s - 1]).product::<f64>();
                }
                return;
            }
            for b in 0..blocks.len() {
                blocks[b] += 1;
                walk(i + 1, m, j, blocks, x, acc);
                blocks[b] -= 1;
            }
            if blocks.len() < j {
                blocks.push(1);
                walk(i + 1, m, j, blocks, x, acc);
                blocks.pop();
            }
        }
        let mut acc = 0.0;
        walk(0, m, j, &mut Vec::new(), x, &mut acc);
        acc
    }

    #[test]
    fn worked_values() {
        assert_eq!(partial_bell(3, 1, &[1.0, 2.0, 5.0]).unwrap(), 5.0);
        assert_eq!(partial_bell(3, 2, &[2.0, 3.0]).unwrap(), 18.0);
        assert_eq!(partial_bell(4, 2, &[1.0, 1.0, 1.0]).unwrap(), 7.0);
        assert_eq!(partial_bell(0, 0, &[]).unwrap(), 1.0);
        assert_eq!(partial_bell(3, 0, &[1.0, 1.0, 1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn argument_errors() {
        assert!(matches!(
            partial_bell(2, 3, &[1.0]),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            partial_bell(4, 2, &[1.0, 1.0]),
            Err(Error::Argument(_))
        ));
        assert!(partial_bell_table(3, &[1.0]).is_err());
    }

    #[test]
    fn stirling_numbers_at_unit_arguments() {
        // B_{m,j}(1,1,…) = S(m, j)
        let t = partial_bell_table(6, &[1.0; 6]).unwrap();
        assert_eq!(t[6][1..=6], [1.0, 31.0, 90.0, 65.0, 15.0, 1.0]);
    }

    #[test]
    fn matches_partition_enumeration() {
        let x = [0.7, -1.3, 2.1, 0.4, -0.9, 1.6, 0.25];
        for m in 1..=7 {
            for j in 1..=m {
                let fast = partial_bell(m, j, &x).unwrap();
                let slow = bell_by_partitions(m, j, &x);
                assert!(
                    (fast - slow).abs() <= 1e-12 * slow.abs().max(1.0),
                    "m={m} j={j}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn identities(x in proptest::collection::vec(-3.0f64..3.0, 9)) {
            let table = partial_bell_table(9, &x).unwrap();
            for m in 1..=9usize {
                let tol = |v: f64| 1e-12 * v.abs().max(1e-300);
                // single block and all-singletons
                prop_assert!((table[m][1] - x[m - 1]).abs() <= tol(x[m - 1]));
                let singletons = x[0].powi(m as i32);
                prop_assert!((table[m][m] - singletons).abs() <= tol(singletons).max(1e-14));
                for j in 1..=m {
                    let lhs = partial_bell(m, j, &x).unwrap();
                    let terms: Vec<f64> = (1..=m - j + 1)
                        .map(|i| {
                            binomial((m - 1) as u32, (i - 1) as u32)
                                * x[i - 1]
                                * partial_bell(m - i, j - 1, &x).unwrap()
                        })
                        .collect();
                    let rhs: f64 = terms.iter().sum();
                    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
                    prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1e-300));
                }
            }
        }
    }
}
