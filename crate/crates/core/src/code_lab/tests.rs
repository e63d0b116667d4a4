use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hamming74() -> LinearCode {
    LinearCode::new(
        2,
        vec![
            vec![1, 0, 0, 0, 1, 1, 0],
            vec![0, 1, 0, 0, 1, 0, 1],
            vec![0, 0, 1, 0, 0, 1, 1],
            vec![0, 0, 0, 1, 1, 1, 1],
        ],
    )
    .unwrap()
}

fn pairwise_min_distance(code: &LinearCode) -> usize {
    let words: Vec<Vec<Symbol>> = (0..code.message_count())
        .map(|m| code.encode_index(m).unwrap())
        .collect();
    let mut best = usize::MAX;
    for a in 0..words.len() {
        for b in a + 1..words.len() {
            let d = words[a].iter().zip(&words[b]).filter(|(x, y)| x != y).count();
            best = best.min(d);
        }
    }
    best
}

/// All subsets of `0..n` of size `w`, ascending.
fn subsets(n: usize, w: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, w: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == w {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, w, cur, out);
            cur.pop();
        }
    }
    rec(0, n, w, &mut cur, &mut out);
    out
}

#[test]
fn random_generator_examples() {
    let mut seen = [0usize; 2];
    for seed in 0..2000 {
        let g = random_generator(1, 1, 2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        seen[g[0][0] as usize] += 1;
    }
    // 3 sigma around 1000
    assert!((seen[0] as f64 - 1000.0).abs() < 3.0 * 500f64.sqrt());
    let a = random_generator(2, 4, 2, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
    let b = random_generator(2, 4, 2, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
    assert_eq!(a, b);
    assert!(random_generator(2, 4, 4, &mut ChaCha8Rng::seed_from_u64(7)).is_err());
    assert!(random_generator(5, 4, 2, &mut ChaCha8Rng::seed_from_u64(7)).is_err());
}

#[test]
fn random_generator_entries_uniform() {
    // chi-square with q - 1 = 4 degrees of freedom; 1% critical value 13.277
    let q = 5u32;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut counts = [0f64; 5];
    for _ in 0..10_000 {
        let g = random_generator(1, 1, q, &mut rng).unwrap();
        counts[g[0][0] as usize] += 1.0;
    }
    let chi2: f64 = counts.iter().map(|c| (c - 2000.0).powi(2) / 2000.0).sum();
    assert!(chi2 < 13.277, "chi2 = {chi2}");
}

#[test]
fn encode_examples() {
    let code = LinearCode::new(3, vec![vec![1, 1, 2]]).unwrap();
    assert_eq!(code.encode(&[2]).unwrap(), vec![2, 2, 1]);
    assert_eq!(code.encode(&[0]).unwrap(), vec![0, 0, 0]);
    let id = LinearCode::new(5, (0..3).map(|i| (0..3).map(|j| (i == j) as u32).collect()).collect()).unwrap();
    assert_eq!(id.encode(&[4, 0, 3]).unwrap(), vec![4, 0, 3]);
    assert!(code.encode(&[3]).is_err());
    assert!(code.encode(&[1, 1]).is_err());
}

#[test]
fn codebook_matches_direct_encoding() {
    for q in [2u32, 3, 5] {
        let g = random_generator(3, 6, q, &mut ChaCha8Rng::seed_from_u64(q as u64)).unwrap();
        let code = LinearCode::new(q, g).unwrap();
        for m in 0..code.message_count() {
            assert_eq!(code.codeword(m).unwrap(), code.encode_index(m).unwrap());
            assert_eq!(code.index_of(&code.message_from_index(m)), m);
        }
    }
}

#[test]
fn min_distance_examples() {
    let rep = LinearCode::new(2, vec![vec![1, 1, 1]]).unwrap();
    assert_eq!(rep.min_distance().unwrap(), 3);
    let id = LinearCode::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
    assert_eq!(id.min_distance().unwrap(), 1);
    assert_eq!(hamming74().min_distance().unwrap(), 3);
    let deficient = LinearCode::new(2, vec![vec![1, 1, 0], vec![1, 1, 0]]).unwrap();
    assert_eq!(deficient.min_distance().unwrap(), 0);
}

#[test]
fn min_distance_weight_equals_pairwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (q, k, n) in [(2u32, 5usize, 10usize), (2, 10, 14), (3, 4, 8), (5, 3, 7), (7, 2, 5)] {
        for _ in 0..5 {
            let code = LinearCode::new(q, random_generator(k, n, q, &mut rng).unwrap()).unwrap();
            assert_eq!(code.min_distance().unwrap(), pairwise_min_distance(&code));
        }
    }
}

#[test]
fn syndrome_mode_agrees_with_codebook_mode() {
    // k = 21 > 20 forces the syndrome decoder; its distance must match a
    // brute-force low-weight codeword search through the parity checks.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let code = loop {
            if let Ok(c) = LinearCode::new(2, random_generator(21, 28, 2, &mut rng).unwrap()) {
                break c;
            }
        };
        assert_eq!(code.mode(), DecoderMode::Syndrome);
        let h = code.parity_check().unwrap();
        let d = code.min_distance().unwrap();
        let is_codeword = |support: &[usize]| {
            h.iter().all(|row| support.iter().map(|&j| row[j]).sum::<u32>() % 2 == 0)
        };
        for w in 1..d {
            assert!(subsets(28, w).iter().all(|s| !is_codeword(s)), "weight {w} codeword below d = {d}");
        }
        assert!(subsets(28, d).iter().any(|s| is_codeword(s)));
        // parity checks annihilate every generator row
        for row in code.generator() {
            for hrow in h {
                assert_eq!(row.iter().zip(hrow).map(|(a, b)| a * b).sum::<u32>() % 2, 0);
            }
        }
    }
}

#[test]
fn syndrome_decoding_corrects_within_radius() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sample = varshamov_sample(22, 30, 2, 3, &mut rng, 200).unwrap();
    let code = sample.code;
    assert_eq!(code.mode(), DecoderMode::Syndrome);
    let t = (code.min_distance().unwrap() - 1) / 2;
    for trial in 0..200u64 {
        let m = rng.random_range(0..code.message_count());
        let mut r = code.encode_index(m).unwrap();
        for j in subsets(30, t)[trial as usize % subsets(30, t).len()].iter() {
            r[*j] ^= 1;
        }
        assert_eq!(min_distance_decode(&r, &code).unwrap(), m);
    }
}

#[test]
fn ternary_syndrome_mode() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let code = loop {
        if let Ok(c) = LinearCode::new(3, random_generator(14, 18, 3, &mut rng).unwrap()) {
            break c;
        }
    };
    assert_eq!(code.mode(), DecoderMode::Syndrome);
    let d = code.min_distance().unwrap();
    assert!(d >= 1);
    for _ in 0..50 {
        let m = rng.random_range(0..code.message_count());
        let c = code.encode_index(m).unwrap();
        assert_eq!(min_distance_decode(&c, &code).unwrap(), m);
        if d >= 3 {
            let mut r = c.clone();
            let j = rng.random_range(0..18);
            r[j] = (r[j] + rng.random_range(1..3)) % 3;
            assert_eq!(min_distance_decode(&r, &code).unwrap(), m);
        }
    }
}

#[test]
fn hamming74_single_errors_all_corrected() {
    let code = hamming74();
    for m in 0..16 {
        let c = code.encode_index(m).unwrap();
        assert_eq!(min_distance_decode(&c, &code).unwrap(), m);
        for j in 0..7 {
            let mut r = c.clone();
            r[j] ^= 1;
            assert_eq!(min_distance_decode(&r, &code).unwrap(), m);
        }
    }
}

#[test]
fn erasure_examples() {
    let rep = LinearCode::new(2, vec![vec![1, 1, 1]]).unwrap();
    assert_eq!(erasure_decode(&[1, 2, 2], &rep).unwrap(), ErasureDecoding::Unique { message: 1 });
    assert_eq!(
        erasure_decode(&[2, 2, 2], &rep).unwrap(),
        ErasureDecoding::Ambiguous {
            rank: 0,
            consistent: BigUint::from(2u32)
        }
    );
    assert_eq!(erasure_decode(&[0, 1, 2], &rep).unwrap(), ErasureDecoding::Inconsistent);
    let code = hamming74();
    for m in 0..16 {
        let c = code.encode_index(m).unwrap();
        assert_eq!(erasure_decode(&c, &code).unwrap(), ErasureDecoding::Unique { message: m });
        for s in subsets(7, 2) {
            let mut r = c.clone();
            for j in s {
                r[j] = 2;
            }
            assert_eq!(erasure_decode(&r, &code).unwrap(), ErasureDecoding::Unique { message: m });
        }
    }
}

#[test]
fn varshamov_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let s = varshamov_sample(2, 5, 2, 1, &mut rng, 10).unwrap();
    assert!(s.code.min_distance().unwrap() >= 1);
    let mut hits = 0;
    for seed in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if varshamov_sample(3, 12, 2, 4, &mut rng, 50).is_ok() {
            hits += 1;
        }
    }
    assert!(hits >= 198, "{hits}/200");
    let err = varshamov_sample(11, 12, 2, 5, &mut rng, 100).unwrap_err();
    match err {
        Error::VarshamovExhausted { rate, gv_rate, .. } => assert!(rate > gv_rate),
        other => panic!("unexpected {other:?}"),
    }
    assert!(varshamov_sample(2, 10, 2, 6, &mut rng, 10).is_err());
}

#[test]
fn varshamov_attempts_grow_toward_gv_rate() {
    // n = 14, d = 4: success probability per draw falls as k grows
    let mut means = Vec::new();
    for k in [2usize, 4, 6, 7] {
        let mut total = 0usize;
        for seed in 0..60 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            total += varshamov_sample(k, 14, 2, 4, &mut rng, 10_000).unwrap().attempts;
        }
        means.push(total as f64 / 60.0);
    }
    assert!(means.windows(2).all(|w| w[0] <= w[1]), "{means:?}");
}

#[test]
fn gv_distance_values() {
    // 2^3 Vol(12, d-1) <= 2^11 needs Vol <= 256: Vol(12,2) = 79, Vol(12,3) = 299
    assert_eq!(gv_distance(3, 12, 2).unwrap(), 3);
    assert_eq!(gv_distance(12, 12, 2).unwrap(), 1);
}

#[test]
fn text_round_trip() {
    let code = hamming74();
    let text = code.to_text();
    assert!(text.starts_with("# linear code q=2 k=4 n=7\n"));
    assert_eq!(LinearCode::from_text(&text).unwrap(), code);
    assert!(LinearCode::from_text("1 0\n0 1\n").is_err());
    assert!(LinearCode::from_text("# q=2\n1 0\n0 1 1\n").is_err());
}

#[test]
fn rejects_oversized_codes() {
    // q^k > 2^20 and q^(n-k) > 2^20
    let g = random_generator(30, 60, 2, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert!(matches!(LinearCode::new(2, g), Err(Error::InvalidCode(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn encode_is_linear(seed in any::<u64>(), a in any::<u64>(), b in any::<u64>(), s in 0u32..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = LinearCode::new(5, random_generator(3, 7, 5, &mut rng).unwrap()).unwrap();
        let count = code.message_count();
        let (ua, ub) = (code.message_from_index(a % count), code.message_from_index(b % count));
        let sum: Vec<u32> = ua.iter().zip(&ub).map(|(x, y)| (x + y) % 5).collect();
        let scaled: Vec<u32> = ua.iter().map(|x| x * s % 5).collect();
        let (ca, cb) = (code.encode(&ua).unwrap(), code.encode(&ub).unwrap());
        let expect_sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % 5).collect();
        let expect_scaled: Vec<u32> = ca.iter().map(|x| x * s % 5).collect();
        prop_assert_eq!(code.encode(&sum).unwrap(), expect_sum);
        prop_assert_eq!(code.encode(&scaled).unwrap(), expect_scaled);
    }
}
