//! Public-API flows across modules.

use std::collections::BTreeMap;

use flataff::affine::BlockSplit;
use flataff::cech::{cohomology, coboundary_matrix_with, Gluing, LocalSystem, Nerve, Simplex};
use flataff::cohomology::{radiance_class, CoefficientModule};
use flataff::fibration::{
    equivariance_check, induced_h1_action, is_alt, radiance_map, validate_fibration, FibrationData, Witness,
};
use flataff::group::{fox_jacobian_with, AffineRepresentation, GroupHom, Presentation, Word};
use flataff::ladder::{run_ladder, LadderSpec, LadderStatus, LevelData};
use flataff::matrix::vec_from_i64;
use flataff::rational::{frac, int};
use flataff::{AffineMap, MatrixQ, Strategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn word(s: &[(usize, i64)]) -> Word {
    Word::from_signed(s).unwrap()
}

fn gamma() -> AffineRepresentation {
    let f1 = AffineMap::translation_by(vec_from_i64(&[1, 0, 0]));
    let f2 = AffineMap::translation_by(vec_from_i64(&[0, 1, 0]));
    let f3 =
        AffineMap::new(MatrixQ::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]), vec_from_i64(&[0, 0, 1])).unwrap();
    let rels = vec![
        Word::commutator(&Word::gen(0), &Word::gen(1)),
        Word::commutator(&Word::gen(0), &Word::gen(2)),
        Word::commutator(&Word::gen(2), &Word::gen(1)).concat(&Word::gen(0).inverse()),
    ];
    AffineRepresentation::new(Presentation::new(3, rels).unwrap(), 3, vec![f1, f2, f3]).unwrap()
}

fn fibration(perm: Vec<usize>, fiber: Vec<usize>, witnesses: Vec<Witness>, base_gen: usize) -> FibrationData {
    let images = (0..3).map(|g| if g == base_gen { Word::gen(0) } else { Word::empty() }).collect();
    let q = GroupHom::new(gamma().presentation().clone(), Presentation::free(1), images).unwrap();
    FibrationData::new(&gamma(), perm, BlockSplit::new(1, 2).unwrap(), fiber, witnesses, Some(q)).unwrap()
}

#[test]
fn gamma_fibrations_end_to_end() {
    let rep = gamma();
    assert!(rep.verify().passed());
    assert!(!radiance_class(&rep).unwrap().is_zero());

    let p3 = fibration(
        vec![2, 0, 1],
        vec![0, 1],
        vec![
            Witness { ambient: 2, fiber: 0, word: word(&[(0, 1)]) },
            Witness { ambient: 2, fiber: 1, word: word(&[(1, 1), (0, 1)]) },
        ],
        2,
    );
    let p2 = fibration(
        vec![1, 0, 2],
        vec![0, 2],
        vec![
            Witness { ambient: 1, fiber: 0, word: word(&[(0, 1)]) },
            Witness { ambient: 1, fiber: 2, word: word(&[(0, -1), (2, 1)]) },
        ],
        1,
    );
    for d in [&p3, &p2] {
        assert!(validate_fibration(d).passed());
    }
    assert!(is_alt(&p3).unwrap());
    assert!(!is_alt(&p2).unwrap());

    // Over p2 the radiance map is r(y) = (1, 0, y, 1) in the canonical H¹ basis.
    let r = radiance_map(&p2).unwrap();
    assert_eq!(r.evaluate(&[frac(3, 4)]).unwrap(), vec![int(1), int(0), frac(3, 4), int(1)]);

    let a = induced_h1_action(&p3, 2).unwrap();
    let expected = MatrixQ::from_i64(&[&[1, 1, 0, 0], &[0, 1, 0, 0], &[-1, -1, 1, 1], &[0, -1, 0, 1]]);
    assert_eq!(a, expected);

    let points: Vec<Vec<_>> = [(0, 1), (5, 3), (-2, 7)].iter().map(|&(n, d)| vec![frac(n, d)]).collect();
    for d in [&p3, &p2] {
        for g in 0..3 {
            assert!(equivariance_check(d, g, &points).unwrap().passed());
        }
    }
}

fn random_nerve(rng: &mut impl Rng) -> Nerve {
    let n = rng.gen_range(3..=6);
    let tops: Vec<Simplex> = (0..rng.gen_range(2..=5))
        .map(|_| {
            let mut s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            if s.is_empty() {
                s.push(rng.gen_range(0..n));
            }
            s.truncate(4);
            s
        })
        .chain((0..n).map(|v| vec![v]))
        .collect();
    Nerve::closure(n, &tops).unwrap()
}

fn random_invertible(rng: &mut impl Rng, n: usize) -> MatrixQ {
    loop {
        let m = MatrixQ::new(n, n, (0..n * n).map(|_| frac(rng.gen_range(-3..=3), rng.gen_range(1..=3))).collect())
            .unwrap();
        if m.determinant().unwrap() != int(0) {
            return m;
        }
    }
}

/// Σ(−1)^k dim Hᵏ = dim · Σ(−1)^k #k-simplices, an oracle independent of the ranks.
#[test]
fn euler_characteristic_matches_simplex_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..40 {
        let nerve = random_nerve(&mut rng);
        let dim = rng.gen_range(1..=2);
        let frames: Vec<MatrixQ> = (0..nerve.vertex_count()).map(|_| random_invertible(&mut rng, dim)).collect();
        let s = LocalSystem::from_frames(nerve.clone(), &frames).unwrap();
        let top = nerve.max_degree().unwrap();
        let mut chi_h = 0i64;
        let mut chi_c = 0i64;
        for k in 0..=top {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            chi_h += sign * cohomology(&s, k).unwrap().dim() as i64;
            chi_c += sign * (nerve.count(k) * dim) as i64;
        }
        assert_eq!(chi_h, chi_c);
        // A system built from frames is isomorphic to the constant one.
        let constant = LocalSystem::constant(nerve.clone(), dim);
        for k in 0..=top {
            assert_eq!(cohomology(&s, k).unwrap().dim(), cohomology(&constant, k).unwrap().dim());
        }
    }
}

#[test]
fn strategies_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..10 {
        let n = rng.gen_range(4..=12);
        let m = MatrixQ::new(n, n + 2, (0..n * (n + 2)).map(|_| int(rng.gen_range(-4..=4))).collect()).unwrap();
        assert_eq!(m.rref_with(Strategy::Sequential), m.rref_with(Strategy::Parallel));

        let gens = rng.gen_range(1..=3);
        let rels: Vec<Word> = (0..3)
            .map(|_| {
                let (a, b) = (rng.gen_range(0..gens), rng.gen_range(0..gens));
                Word::commutator(&Word::gen(a), &Word::gen(b))
            })
            .filter(|w| !w.free_reduce().is_empty())
            .collect();
        let p = Presentation::new(gens, rels).unwrap();
        let module = CoefficientModule::trivial(p.clone(), 2);
        assert_eq!(
            fox_jacobian_with(&p, &module, Strategy::Sequential),
            fox_jacobian_with(&p, &module, Strategy::Parallel)
        );

        let nerve = random_nerve(&mut rng);
        let frames: Vec<MatrixQ> = (0..nerve.vertex_count()).map(|_| random_invertible(&mut rng, 2)).collect();
        let s = LocalSystem::from_frames(nerve.clone(), &frames).unwrap();
        for k in 0..nerve.max_degree().unwrap() {
            assert_eq!(
                coboundary_matrix_with(&s, k, Strategy::Sequential).unwrap(),
                coboundary_matrix_with(&s, k, Strategy::Parallel).unwrap()
            );
        }
    }
}

/// Level 1 glues strictly; level 2 carries a defect whose class in the declared constant
/// system generates H² of the tetrahedron boundary.
#[test]
fn obstruction_reported_at_the_second_level() {
    let nerve = Nerve::simplex_boundary(3);
    let edges = nerve.simplices(1).to_vec();
    let strict: BTreeMap<_, _> = edges.iter().map(|e| ((e[0], e[1]), AffineMap::identity(1))).collect();
    let mut planted = strict.clone();
    for j in 1..4 {
        planted.insert((0, j), AffineMap::linear_map(MatrixQ::from_i64(&[&[2]])).unwrap());
    }
    planted.insert((1, 2), AffineMap::translation_by(vec_from_i64(&[-1])));
    let level = |l: usize, maps: &BTreeMap<(usize, usize), AffineMap>| LevelData {
        level: l,
        system: LocalSystem::constant(nerve.clone(), 1),
        gluing: Gluing::new(nerve.clone(), 1, maps.clone()).unwrap(),
    };
    let spec = LadderSpec::new(nerve.clone(), vec![level(1, &strict), level(2, &planted)], vec![]).unwrap();
    let v = run_ladder(&spec).unwrap();
    assert_eq!(v.status, LadderStatus::ObstructedAtRung(2));
    assert_eq!(v.rungs.len(), 2);
    assert!(v.rungs[0].correction.as_ref().unwrap().is_zero());
    let cert = v.rungs[1].certificate.as_ref().unwrap();
    assert!(cert.iter().any(|c| *c != int(0)));

    let first = run_ladder(&spec.truncated(1)).unwrap();
    assert_eq!(first.status, LadderStatus::Solvable);
    assert_eq!(first.rungs[0], v.rungs[0]);
}
