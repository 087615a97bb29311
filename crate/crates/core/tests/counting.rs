use bipart_core::count::{count_1d, count_naive, count_table, CountTable, PartSet, Target};
use num_bigint::BigUint;

/// Enumerates multiplicity vectors over the parts fitting inside (n1, n2).
fn enumerate(part_set: PartSet, n1: usize, n2: usize) -> u64 {
    let parts: Vec<(usize, usize)> = (0..=n1)
        .flat_map(|a| (0..=n2).map(move |b| (a, b)))
        .filter(|&(a, b)| part_set.contains(a, b))
        .collect();
    fn go(parts: &[(usize, usize)], r1: usize, r2: usize) -> u64 {
        match parts.split_first() {
            None => u64::from(r1 == 0 && r2 == 0),
            Some((&(a, b), rest)) => {
                let mut total = 0;
                let mut k = 0;
                while k * a <= r1 && k * b <= r2 {
                    total += go(rest, r1 - k * a, r2 - k * b);
                    k += 1;
                }
                total
            }
        }
    }
    go(&parts, n1, n2)
}

/// Euler's pentagonal recurrence for one-dimensional partition numbers.
fn pentagonal(n: usize) -> Vec<i128> {
    let mut p = vec![0i128; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut k = 1i64;
        loop {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > m {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            p[m] += sign * p[m - g1];
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= m {
                p[m] += sign * p[m - g2];
            }
            k += 1;
        }
    }
    p
}

#[test]
fn table_matches_enumeration_up_to_six() {
    for part_set in PartSet::ALL {
        let table = count_table(part_set, 6, 6).unwrap();
        for a in 0..=6 {
            for b in 0..=6 {
                let want = BigUint::from(enumerate(part_set, a, b));
                assert_eq!(table.get(a, b), Some(&want), "{part_set} ({a},{b})");
                assert_eq!(count_naive(part_set, Target::new(a, b)).unwrap(), want);
            }
        }
    }
}

#[test]
fn nonzero_counts_factor_through_axes() {
    let strict = count_table(PartSet::StrictPositive, 12, 12).unwrap();
    let nonzero = count_table(PartSet::NonzeroVectors, 12, 12).unwrap();
    let p1 = pentagonal(12);
    for n1 in 0..=12 {
        for n2 in 0..=12 {
            let mut sum = BigUint::from(0u32);
            for a in 0..=n1 {
                for b in 0..=n2 {
                    let w = BigUint::from((p1[n1 - a] * p1[n2 - b]) as u128);
                    sum += strict.get(a, b).unwrap() * w;
                }
            }
            assert_eq!(nonzero.get(n1, n2), Some(&sum), "({n1},{n2})");
        }
    }
}

#[test]
fn tables_are_symmetric() {
    for part_set in PartSet::ALL {
        let t = count_table(part_set, 25, 25).unwrap();
        for a in 0..=25 {
            for b in 0..a {
                assert_eq!(t.get(a, b), t.get(b, a));
            }
        }
    }
}

#[test]
fn adding_a_unit_diagonal_part_injects() {
    let t = count_table(PartSet::NonzeroVectors, 20, 30).unwrap();
    for a in 0..20 {
        for b in 0..30 {
            assert!(t.get(a, b) <= t.get(a + 1, b + 1));
        }
    }
}

#[test]
fn rebuilding_is_deterministic() {
    for part_set in PartSet::ALL {
        let a = CountTable::build(part_set, 15, 40).unwrap();
        let b = CountTable::build(part_set, 15, 40).unwrap();
        assert_eq!(a, b);
        let (mut x, mut y) = (Vec::new(), Vec::new());
        a.write_csv(&mut x).unwrap();
        b.write_csv(&mut y).unwrap();
        assert_eq!(x, y);
    }
}

#[test]
fn one_dimensional_numbers() {
    assert_eq!(count_1d(50), BigUint::from(204226u32));
    let p = pentagonal(100);
    for n in [0, 1, 7, 33, 100] {
        assert_eq!(count_1d(n), BigUint::from(p[n] as u128));
    }
}

#[test]
fn small_cli_examples() {
    assert_eq!(count_naive(PartSet::NonzeroVectors, Target::new(1, 1)).unwrap(), BigUint::from(2u32));
    assert_eq!(count_naive(PartSet::StrictPositive, Target::new(2, 2)).unwrap(), BigUint::from(2u32));
    assert_eq!(count_naive(PartSet::StrictPositive, Target::new(0, 0)).unwrap(), BigUint::from(1u32));
}
