use std::sync::Arc;

use shapley_core::exact::{exact_shapley_by_permutations, ValueTable};
use shapley_core::games::{linear_combination, make_glove_game, make_unanimity_game, tabulate};
use shapley_core::{
    augment_with_dummy, exact_pair_difference, exact_shapley, exact_statistic_expectation, fixture_configs,
    SamplingDistribution, UtilitySpec, Variant,
};

const TOL: f64 = 1e-10;

fn fixtures() -> Vec<UtilitySpec> {
    fixture_configs().iter().map(|c| c.build().unwrap()).collect()
}

fn close(a: f64, b: f64, what: &str) {
    assert!((a - b).abs() <= TOL, "{what}: {a} vs {b}");
}

/// Players `i` and `j` are interchangeable in every coalition without both.
fn interchangeable(table: &[f64], n: usize, i: usize, j: usize) -> bool {
    let (bi, bj) = (1usize << i, 1usize << j);
    (0..1usize << n)
        .filter(|m| m & (bi | bj) == 0)
        .all(|m| (table[m | bi] - table[m | bj]).abs() <= 1e-15)
}

fn is_dummy(table: &[f64], n: usize, i: usize) -> bool {
    let b = 1usize << i;
    (0..1usize << n)
        .filter(|m| m & b == 0)
        .all(|m| (table[m | b] - table[m]).abs() <= 1e-15)
}

#[test]
fn efficiency_symmetry_dummy() {
    for u in fixtures() {
        let n = u.n_players();
        let phi = exact_shapley(&u).unwrap();
        close(phi.sum(), u.net_total().unwrap(), u.label());
        let table = tabulate(&u).unwrap();
        for i in 0..n {
            if is_dummy(&table, n, i) {
                close(phi[i], 0.0, u.label());
            }
            for j in i + 1..n {
                if interchangeable(&table, n, i, j) {
                    close(phi[i], phi[j], u.label());
                }
            }
        }
    }
}

#[test]
fn linearity() {
    let all = fixtures();
    let mut checked = 0;
    for a in &all {
        for b in all
            .iter()
            .filter(|b| b.n_players() == a.n_players() && b.label() != a.label())
        {
            let mix = linear_combination(0.3, a, 0.6, b).unwrap();
            let (pa, pb, pm) = (
                exact_shapley(a).unwrap(),
                exact_shapley(b).unwrap(),
                exact_shapley(&mix).unwrap(),
            );
            for i in 0..a.n_players() {
                close(pm[i], 0.3 * pa[i] + 0.6 * pb[i], mix.label());
            }
            checked += 1;
        }
    }
    assert!(checked >= 6, "only {checked} pairs of equal-size fixtures");
}

#[test]
fn known_values_match() {
    for u in fixtures() {
        if let Some(known) = u.known_shapley() {
            let phi = exact_shapley(&u).unwrap();
            for (i, k) in known.iter().enumerate() {
                close(phi[i], *k, u.label());
            }
        }
    }
    let u = make_unanimity_game(7, &[1, 3, 4]).unwrap();
    let phi = exact_shapley(&u).unwrap();
    close(phi[3], 1.0 / 3.0, "unanimity carrier");
}

#[test]
fn permutation_oracle_agrees() {
    for u in fixtures().into_iter().filter(|u| u.n_players() <= 9) {
        let a = exact_shapley(&u).unwrap();
        let b = exact_shapley_by_permutations(&u).unwrap();
        assert!(a.linf_distance(&b.values) <= TOL, "{}", u.label());
    }
}

#[test]
fn pair_differences_match_shapley_gaps() {
    for u in fixtures() {
        let phi = exact_shapley(&u).unwrap();
        let table = ValueTable::build(&u, None).unwrap();
        for i in 0..u.n_players() {
            for j in 0..u.n_players() {
                if i != j {
                    close(table.pair_difference(i, j).unwrap(), phi[i] - phi[j], u.label());
                }
            }
        }
        if u.n_players() >= 2 {
            close(exact_pair_difference(&u, 1, 0).unwrap(), phi[1] - phi[0], u.label());
        }
    }
}

#[test]
fn scaled_statistic_is_unbiased() {
    for u in fixtures() {
        let n = u.n_players();
        let phi = exact_shapley(&u).unwrap();
        let original = SamplingDistribution::new(n, Variant::Original).unwrap();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let e = exact_statistic_expectation(&original, &u, i, j).unwrap();
                    close(original.z() * e, phi[i] - phi[j], u.label());
                }
            }
        }
        let augmented = SamplingDistribution::new(n, Variant::Augmented).unwrap();
        let u_aug = augment_with_dummy(&u);
        for i in 0..n {
            let e = exact_statistic_expectation(&augmented, &u_aug, i, n).unwrap();
            close(augmented.z() * e, phi[i], u.label());
        }
    }
}

#[test]
fn dummy_augmentation_preserves_values() {
    for u in fixtures().into_iter().filter(|u| u.n_players() <= 9) {
        let n = u.n_players();
        let phi = exact_shapley(&u).unwrap();
        let aug = exact_shapley(&augment_with_dummy(&u)).unwrap();
        assert_eq!(aug.len(), n + 1);
        close(aug[n], 0.0, u.label());
        assert!(phi.linf_distance(&aug.values[..n]) <= TOL, "{}", u.label());
        if n <= 8 {
            let twice = Arc::new(augment_with_dummy(&u)).augmented();
            assert_eq!(twice.dummy_depth(), 2);
            let aug2 = exact_shapley(&twice).unwrap();
            close(aug2[n], 0.0, u.label());
            close(aug2[n + 1], 0.0, u.label());
            assert!(phi.linf_distance(&aug2.values[..n]) <= TOL, "{}", u.label());
        }
    }
}

#[test]
fn glove_reference_values() {
    let u = make_glove_game(&[0, 1], &[2]).unwrap();
    let phi = exact_shapley(&u).unwrap();
    close(phi[0], 1.0 / 6.0, "glove");
    close(phi[2], 2.0 / 3.0, "glove");
    close(exact_pair_difference(&u, 0, 2).unwrap(), -0.5, "glove");
}
