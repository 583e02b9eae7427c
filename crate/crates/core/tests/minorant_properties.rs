use lipminor::acceptance::brute_force_minorant;
use lipminor::{compute_minorant, CadlagPath};
use proptest::prelude::*;

/// Steps `(gap, increment, jump)`; a jump of zero means a continuity point.
fn path_strategy(max_len: usize) -> impl Strategy<Value = CadlagPath> {
    (
        -3.0..3.0f64,
        prop::collection::vec((1e-3..0.2f64, -0.5..0.5f64, prop_oneof![3 => Just(0.0), 1 => -2.0..2.0f64]), 1..max_len),
    )
        .prop_map(|(start, steps)| {
            let mut times = vec![start];
            let mut values = vec![0.0];
            let mut left = vec![None];
            let (mut t, mut x) = (start, 0.0);
            for (gap, inc, jump) in steps {
                t += gap;
                x += inc;
                let before = x;
                x += jump;
                times.push(t);
                values.push(x);
                left.push((jump != 0.0).then_some(before));
            }
            CadlagPath::new(times, values, left).unwrap()
        })
}

fn alpha_strategy() -> impl Strategy<Value = f64> {
    0.05..8.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scans_match_brute_force(path in path_strategy(512), alpha in alpha_strategy()) {
        let fast = compute_minorant(&path, alpha, 0.0).unwrap();
        let slow = brute_force_minorant(&path, alpha);
        for (a, b) in fast.m.iter().zip(&slow) {
            prop_assert!((a - b).abs() <= 1e-12, "scan {a} vs brute force {b}");
        }
    }

    #[test]
    fn dominated_and_lipschitz(path in path_strategy(128), alpha in alpha_strategy()) {
        let r = compute_minorant(&path, alpha, 0.0).unwrap();
        let t = path.times();
        for i in 0..path.len() {
            prop_assert!(r.m[i] <= path.lower(i));
            for j in 0..i {
                prop_assert!((r.m[i] - r.m[j]).abs() <= alpha * (t[i] - t[j]) + 1e-12);
            }
        }
    }

    #[test]
    fn idempotent(path in path_strategy(256), alpha in alpha_strategy()) {
        let r = compute_minorant(&path, alpha, 0.0).unwrap();
        let again = compute_minorant(&CadlagPath::continuous(path.times().to_vec(), r.m.clone()).unwrap(), alpha, 0.0).unwrap();
        for (a, b) in r.m.iter().zip(&again.m) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        prop_assert!(again.contact_mask.iter().all(|&c| c));
    }

    #[test]
    fn monotone_in_alpha(path in path_strategy(256), a in alpha_strategy(), factor in 1.0..4.0f64) {
        let lo = compute_minorant(&path, a, 0.0).unwrap();
        let hi = compute_minorant(&path, a * factor, 0.0).unwrap();
        for i in 0..path.len() {
            prop_assert!(lo.m[i] <= hi.m[i]);
            prop_assert!(!lo.contact_mask[i] || hi.contact_mask[i], "contact at {i} lost when alpha grows");
        }
    }

    #[test]
    fn shift_equivariant(path in path_strategy(256), alpha in alpha_strategy(), c in -4.0..4.0f64, u in -4.0..4.0f64) {
        let base = compute_minorant(&path, alpha, 0.0).unwrap();
        // Shifts by a power of two keep every sum exact, so the comparison can be exact too.
        let c = (c * 8.0).round() / 8.0;
        let up = compute_minorant(&path.shift_values(c).unwrap(), alpha, 0.0).unwrap();
        for (a, b) in base.m.iter().zip(&up.m) {
            prop_assert!((b - (a + c)).abs() <= 1e-12 * (1.0 + a.abs() + c.abs()));
        }
        let moved_path = path.shift_times(u).unwrap();
        let moved = compute_minorant(&moved_path, alpha, 0.0).unwrap();
        let contacts = |r: &lipminor::MinorantResult, p: &CadlagPath| -> Vec<f64> {
            (0..p.len()).filter(|&i| r.contact_mask[i]).map(|i| p.times()[i]).collect()
        };
        let before = contacts(&base, &path);
        let after = contacts(&moved, &moved_path);
        prop_assert_eq!(before.len(), after.len());
        for (a, b) in before.iter().zip(&after) {
            prop_assert!((b - (a + u)).abs() <= 1e-12 * (1.0 + a.abs() + u.abs()));
        }
    }

    /// Replacing the path after an index `k` by the ray `m(t_k) - α(t - t_k)`
    /// leaves the minorant up to `t_k` unchanged.
    #[test]
    fn flow_locality(path in path_strategy(256), alpha in alpha_strategy(), split in 0.0..1.0f64) {
        let r = compute_minorant(&path, alpha, 0.0).unwrap();
        let k = ((path.len() - 1) as f64 * split) as usize;
        let t = path.times();
        let mut values = path.values().to_vec();
        let mut left = path.left_values().to_vec();
        for i in k + 1..path.len() {
            values[i] = r.m[k] - alpha * (t[i] - t[k]);
            left[i] = None;
        }
        let cut = CadlagPath::new(t.to_vec(), values, left).unwrap();
        let r2 = compute_minorant(&cut, alpha, 0.0).unwrap();
        for i in 0..=k {
            prop_assert!((r.m[i] - r2.m[i]).abs() <= 1e-12 * (1.0 + r.m[i].abs()), "index {i}: {} vs {}", r.m[i], r2.m[i]);
        }
    }
}
