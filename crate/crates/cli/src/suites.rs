//! The verification suites. Each returns report rows; none of them panics on
//! an unsupported configuration, they emit `skip` rows instead.

use hodge_core::compalg::{octonion_char2, octonion_from_hermitian, similar_forms, Base, CompositionAlgebra, Similarity};
use hodge_core::exterior::{klein_quadratic, mask_of, ExtBasis, ExtVector, TopForm};
use hodge_core::forms::{descent_holds, HermitianSpace, NormClass, WittIndex};
use hodge_core::geometry::{
    absolute_points_covered, absolute_points_g, absolute_points_h, all_lines, check_j_polarity, half_turn_subgroup,
    klein_incidence_holds, lambda_fibers, line_count, rational_plane_comparison,
};
use hodge_core::groups::{
    eo_subgroup, enumerate_isometries, generate_from_pool, image_under_eta, image_under_eta_o, isotropic_transvections,
    k_determinant, order_formula, reflection_matrix, special_group, spinor_norm, Codec, Family, GroupError, MapCodec,
};
use hodge_core::hodge::{HodgeOperator, KElem};
use hodge_core::kmodule::{KModule, SplitModules};
use hodge_core::linalg::{vec_add, Matrix, SemiMap};
use hodge_core::scalars::{rat, Field, FiniteField, Rationals, Ternary};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Setup;
use crate::report::{Row, Status};

/// Random vector triples per space in the pairing-identity check.
pub const RANDOM_TRIPLES: usize = 100;
const SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub long: bool,
    pub cap: usize,
}

fn basis<F: Field>(f: &F, n: usize, l: usize) -> Vec<ExtVector<F::Elem>> {
    ExtBasis::new(n, l).masks().iter().map(|&m| ExtVector::basis(f, n, m)).collect()
}

fn random_ext<F: Field>(f: &F, n: usize, l: usize, rng: &mut ChaCha8Rng) -> ExtVector<F::Elem> {
    let len = ExtBasis::new(n, l).len();
    ExtVector::from_coeffs(n, l, (0..len).map(|_| f.random(rng)).collect())
}

fn fmt_matrix<F: Field>(f: &F, m: &Matrix<F::Elem>) -> String {
    let diagonal = (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || f.is_zero(m.get(i, j))));
    if diagonal && m.is_square() {
        let d: Vec<_> = (0..m.rows()).map(|i| f.format(m.get(i, i))).collect();
        return format!("diag({})", d.join(", "));
    }
    let rows: Vec<String> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| f.format(m.get(i, j))).collect::<Vec<_>>().join(", "))
        .collect();
    format!("[{}]", rows.join("; "))
}

fn fraction(good: usize, total: usize) -> String {
    format!("{good}/{total}")
}

fn count_row(id: &str, anchor: &str, good: usize, total: usize) -> Row {
    Row::holds(id, anchor, fraction(total, total), fraction(good, total), good == total && total > 0)
}

// ---------------------------------------------------------------------------
// hodge-identities

pub fn hodge_identities<F: Field>(s: &Setup<F>) -> Vec<Row> {
    let f = s.field();
    let h = &s.hodge;
    let (n, l) = (s.dim(), s.degree());
    let partner = h.partner();
    let d = h.delta().clone();
    let mut rows = vec![Row::info("delta", "hodge operator: delta = (-1)^((n-l)l) det H / N(b0)", f.format(&d))];

    let low = basis(f, n, l);
    let high = basis(f, n, n - l);
    let bad = low
        .iter()
        .find(|x| partner.apply(&h.apply(x)) != x.scale(f, &d))
        .or_else(|| high.iter().find(|z| h.apply(&partner.apply(z)) != z.scale(f, &d)));
    let total = low.len() + high.len();
    let want = format!("delta*id on {total} basis vectors");
    rows.push(match bad {
        None => Row::compare("j-squared", "hodge operator: J^2 = delta id", &want, &want),
        Some(x) => Row::fail("j-squared", "hodge operator: J^2 = delta id", want, format!("differs on {}", x.display(f))),
    });

    let anchor = "hodge operator: six pairing identities of the semi-similitude law";
    let (mut good, mut count) = (0, 0);
    for x in &low {
        for y in &low {
            for z in &high {
                for (a, b) in h.identity_pairs(&partner, x, y, z) {
                    count += 1;
                    good += usize::from(a == b);
                }
            }
        }
    }
    rows.push(count_row("pairing-identities-basis", anchor, good, count));

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut good, mut count) = (0, 0);
    for _ in 0..RANDOM_TRIPLES {
        let x = random_ext(f, n, l, &mut rng);
        let y = random_ext(f, n, l, &mut rng);
        let z = random_ext(f, n, n - l, &mut rng);
        for (a, b) in h.identity_pairs(&partner, &x, &y, &z) {
            count += 1;
            good += usize::from(a == b);
        }
    }
    rows.push(count_row("pairing-identities-random", anchor, good, count));

    let (mut good, mut count) = (0, 0);
    for _ in 0..20 {
        let x = random_ext(f, n, l, &mut rng);
        let c = f.random(&mut rng);
        count += 1;
        good += usize::from(h.apply(&x.scale(f, &c)) == h.apply(&x).scale(f, &f.conj(&c)));
    }
    rows.push(count_row("j-semilinear", "hodge operator: J(x c) = J(x) sigma(c)", good, count));
    rows
}

// ---------------------------------------------------------------------------
// algebra-classify

pub fn algebra_classify<F: Field>(s: &Setup<F>) -> Vec<Row> {
    let f = s.field();
    let space = s.space();
    let k = s.hodge.algebra();
    let mut rows = Vec::new();
    let disc = match space.discriminant() {
        NormClass::Trivial => "trivial".to_string(),
        NormClass::Nontrivial(e) => format!("nontrivial ({})", f.format(&e)),
        NormClass::Unknown(e) => format!("undetermined ({})", f.format(&e)),
    };
    rows.push(Row::info("discriminant-class", "discriminant of h modulo norms", disc));
    let witt = match space.witt_index() {
        WittIndex::Exact(w) => w.to_string(),
        WittIndex::AtLeast(w) => format!(">= {w}"),
    };
    rows.push(Row::info("witt-index", "Witt index of h", witt));
    rows.push(Row::info("k-kind", "algebra K = F + jF", k.kind()));
    let split = k.is_split();
    rows.push(Row::info("k-split", "K split iff delta is a norm", split));

    let anchor = "K split iff it has zero divisors";
    let idem = k.idempotents();
    for p in &idem {
        let ok = k.mul(p, p) == *p && !k.is_zero(p) && *p != k.one();
        rows.push(Row::holds("k-idempotent", anchor, "p^2 = p, p != 0, 1", format!("p = {}", k.format(p)), ok));
    }
    let nil = k.nilpotent();
    if let Some(z) = &nil {
        let ok = k.is_zero(&k.mul(z, z)) && !k.is_zero(z);
        rows.push(Row::holds("k-nilpotent", anchor, "z^2 = 0, z != 0", format!("z = {}", k.format(z)), ok));
    }
    let witness = if !idem.is_empty() || nil.is_some() { Ternary::Yes } else { Ternary::No };
    rows.push(match split {
        Ternary::Unknown => Row::skip("k-split-witness", anchor, "norm question undecided for this field"),
        _ => Row::compare("k-split-witness", anchor, split, witness),
    });
    if let Some(els) = f.elements() {
        let zero_divisor = els
            .iter()
            .flat_map(|a| els.iter().map(move |b| KElem::new(a.clone(), b.clone())))
            .any(|a| !k.is_zero(&a) && f.is_zero(&k.det(&a)));
        rows.push(Row::compare("k-zero-divisor-search", anchor, split, Ternary::from_bool(zero_divisor)));
    }

    if s.dim() == 2 * s.degree() {
        match KModule::new(s.hodge.clone()) {
            Err(e) => rows.push(Row::fail("g-alpha-hermitian", "g(v, u) = alpha(g(u, v))", "yes", e)),
            Ok(km) => {
                let ok = km.is_alpha_hermitian();
                rows.push(Row::holds("g-alpha-hermitian", "g(v, u) = alpha(g(u, v))", "yes", if ok { "yes" } else { "no" }, ok));
                let anchor = "g via J and j^-1 agrees with g via the Pfaffian";
                let b1 = km.b1_vectors();
                let (mut good, mut count) = (0, 0);
                for u in b1 {
                    for v in b1 {
                        let (a, b) = km.g_form_paths(u, v);
                        count += 1;
                        good += usize::from(a == b);
                    }
                }
                let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
                for _ in 0..RANDOM_TRIPLES {
                    let u = random_ext(f, s.dim(), s.degree(), &mut rng);
                    let v = random_ext(f, s.dim(), s.degree(), &mut rng);
                    let (a, b) = km.g_form_paths(&u, &v);
                    count += 1;
                    good += usize::from(a == b);
                }
                rows.push(count_row("g-two-paths", anchor, good, count));
            }
        }
    }
    rows
}

// ---------------------------------------------------------------------------
// split-reductions

fn split_module<F: Field>(s: &Setup<F>, id: &str, anchor: &str) -> Result<KModule<F>, Row> {
    if s.dim() != 2 * s.degree() {
        return Err(Row::skip(id, anchor, "needs n = 2 * degree"));
    }
    match s.hodge.algebra().is_split() {
        Ternary::Yes => {}
        Ternary::No => return Err(Row::skip(id, anchor, "K is not split")),
        Ternary::Unknown => return Err(Row::skip(id, anchor, "splitting undecided for this field")),
    }
    KModule::split(s.space().clone(), s.top().clone(), s.degree()).map_err(|e| Row::fail(id, anchor, "split module", e))
}

pub fn split_reductions<F: Field>(s: &Setup<F>) -> Vec<Row> {
    let f = s.field();
    let km = match split_module(s, "split-reductions", "split case: W decomposes along an idempotent or nilpotent") {
        Ok(km) => km,
        Err(row) => return vec![row],
    };
    let k = km.algebra().clone();
    let sigma_id = !f.has_sigma();
    let odd_char = f.characteristic() != 2;
    let mut rows = Vec::new();
    match km.submodules_split() {
        Err(e) => rows.push(Row::fail("split-decomposition", "split case", "decomposition", e)),
        Ok(SplitModules::Idempotent { p, wp, wq }) => {
            rows.push(Row::compare(
                "wp-plus-wq",
                "W = Wp + W(1-p)",
                ExtBasis::new(s.dim(), s.degree()).len() * f.fixed_degree(),
                wp.len() + wq.len(),
            ));
            if sigma_id && odd_char {
                let two_p = k.mul_scalar(&p, &f.from_int(2));
                let (mut good, mut count) = (0, 0);
                for x in &wp {
                    for y in &wp {
                        count += 1;
                        good += usize::from(km.g_form(x, y) == k.mul_scalar(&two_p, &km.hodge().ext_h(x, y)));
                    }
                }
                rows.push(count_row("g-on-wp", "g(Xp, Yp) = Lambda h(Xp, Yp) 2p", good, count));
            }
            if sigma_id && s.degree() % 2 == 0 {
                let (mut good, mut count) = (0, 0);
                for x in &wp {
                    for y in &wq {
                        count += 1;
                        good += usize::from(k.is_zero(&km.g_form(x, y)));
                    }
                }
                rows.push(count_row("wp-perp-wq", "Wp and W(1-p) are g-orthogonal for even degree", good, count));
            }
        }
        Ok(SplitModules::Nilpotent { wz, .. }) => {
            rows.push(Row::compare("wz-rank", "ker of z acting on W", km.rank(), wz.len()));
            let (mut good, mut count) = (0, 0);
            for x in &wz {
                for y in &wz {
                    count += 1;
                    good += usize::from(k.is_zero(&km.g_form(x, y)));
                }
            }
            rows.push(count_row("g-on-wz-vanishes", "g vanishes on Wz in characteristic 2", good, count));
        }
    }
    match km.g_o_gram() {
        Err(e) => rows.push(Row::fail("g-o-gram", "reduced form g^o", "Gram matrix", e)),
        Ok(go) => {
            rows.push(Row::info("g-o-gram", "reduced form g^o on Wz", fmt_matrix(f, &go)));
            if s.dim() == 4 {
                if sigma_id && !odd_char {
                    let z = go.is_zero(f);
                    rows.push(Row::holds("g-o-degenerate", "g^o = 0 for sigma = id in characteristic 2", "zero", if z { "zero" } else { "nonzero" }, z));
                } else {
                    let det = go.det(f);
                    let ok = !f.is_zero(&det);
                    rows.push(Row::holds("g-o-nondegenerate", "g^o is nondegenerate on Wz", "det != 0", format!("det = {}", f.format(&det)), ok));
                }
            }
        }
    }
    rows
}

// ---------------------------------------------------------------------------
// norm-similarity

pub fn norm_similarity<F: Field>(s: &Setup<F>) -> Vec<Row> {
    let f = s.field();
    let space = s.space();
    if s.dim() != 4 || s.degree() != 2 {
        return vec![Row::skip("norm-similarity", "reduced form versus a norm form", "needs n = 4 and degree 2")];
    }
    let km = match split_module(s, "norm-similarity", "reduced form versus a norm form") {
        Ok(km) => km,
        Err(row) => return vec![row],
    };
    let go = match km.g_o_gram() {
        Ok(g) => g,
        Err(e) => return vec![Row::fail("g-o-gram", "reduced form g^o", "Gram matrix", e)],
    };
    let mut rows = Vec::new();
    let odd_char = f.characteristic() != 2;
    if f.has_sigma() && odd_char {
        let anchor = "octonion algebra as a double of H";
        let q = f.theta().expect("a field with involution has a skew element");
        match octonion_from_hermitian(space, &q) {
            Err(e) => rows.push(Row::skip("octonion-norm", anchor, e)),
            Ok(m) => {
                rows.push(Row::info("doubling-tree", anchor, m.algebra.describe()));
                let ok = m.matches_norm(space);
                rows.push(Row::holds("octonion-norm", "h(x, x) is the octonion norm", "yes", if ok { "yes" } else { "no" }, ok));
                let perp = space.gram_of(&m.perp).map(|x| f.add(x, &f.conj(x)));
                rows.push(Row::compare(
                    "g-o-vs-norm-on-perp",
                    "g^o is the polar norm form on the complement of F",
                    fmt_matrix(f, &perp),
                    fmt_matrix(f, &go),
                ));
            }
        }
    } else if f.has_sigma() {
        let anchor = "characteristic-two octonion model";
        let u = f.trace_one().expect("a separable quadratic extension has a trace-one element");
        match octonion_char2(space, &u) {
            Err(e) => rows.push(Row::skip("octonion-norm", anchor, e)),
            Ok(m) => {
                rows.push(Row::info("doubling-tree", anchor, m.algebra.describe()));
                let ok = m.matches_norm(space);
                rows.push(Row::holds("octonion-norm", "h(x, x) is the octonion norm", "yes", if ok { "yes" } else { "no" }, ok));
                let wz = match km.wz_basis() {
                    Ok(w) => w,
                    Err(e) => return [rows, vec![Row::fail("pq-on-wz", anchor, "Wz basis", e)]].concat(),
                };
                let top = km.hodge().top().clone();
                let pq = |x: &ExtVector<F::Elem>| klein_quadratic(f, &top, x).expect("degree two in dimension four");
                let nv = |v: &[F::Elem]| space.evaluate_h(v, v);
                let pq_vals: Vec<_> = wz.iter().map(|x| f.format(&pq(x))).collect();
                let n_vals: Vec<_> = m.perp.iter().map(|v| f.format(&nv(v))).collect();
                rows.push(Row::compare("pq-on-wz-vs-norm", "Klein form on Wz versus the norm on the complement of F", n_vals.join(", "), pq_vals.join(", ")));
                let (mut good, mut count) = (0, 0);
                for i in 0..wz.len() {
                    for j in i + 1..wz.len() {
                        let fp = f.sub(&f.sub(&pq(&wz[i].add(f, &wz[j])), &pq(&wz[i])), &pq(&wz[j]));
                        let sum = vec_add(f, &m.perp[i], &m.perp[j]);
                        let fnn = f.sub(&f.sub(&nv(&sum), &nv(&m.perp[i])), &nv(&m.perp[j]));
                        count += 1;
                        good += usize::from(fp == fnn);
                    }
                }
                rows.push(count_row("polarization-pairs", "polar forms agree on all basis pairs", good, count));
            }
        }
    } else if odd_char {
        let anchor = "g^o is similar to the pure quaternion norm form";
        let c = &space.orthogonal_basis().values;
        let h = CompositionAlgebra::new(f.clone(), Base::Field)
            .double(f.neg(&f.mul(&c[0], &c[1])))
            .and_then(|a| a.double(f.neg(&f.mul(&c[0], &c[2]))));
        let reduced = HermitianSpace::new(f.clone(), go.clone());
        match (h, reduced) {
            (Err(e), _) => rows.push(Row::fail("quaternion-similarity", anchor, "quaternion algebra", e)),
            (_, Err(e)) => rows.push(Row::fail("quaternion-similarity", anchor, "nondegenerate g^o", e)),
            (Ok(h), Ok(reduced)) => {
                rows.push(Row::info("doubling-tree", anchor, h.describe()));
                let pure: Vec<_> = (1..4).map(|i| h.polar(&h.unit(i), &h.unit(i))).collect();
                let d = reduced.orthogonal_basis().values.clone();
                rows.push(match similar_forms(f, &d, &pure) {
                    Similarity::Similar(x) => Row::holds("quaternion-similarity", anchor, "similar", format!("similar (scalar {})", f.format(&x)), true),
                    Similarity::NotSimilar => Row::fail("quaternion-similarity", anchor, "similar", "not similar"),
                    Similarity::Unknown => Row::skip("quaternion-similarity", anchor, "similarity undecided"),
                });
            }
        }
    } else {
        rows.push(Row::skip("norm-similarity", "reduced form versus a norm form", "the polar norm form degenerates for sigma = id in characteristic 2"));
    }
    rows
}

// ---------------------------------------------------------------------------
// geometry

fn isotropic_point_count(f: &FiniteField, space: &HermitianSpace<FiniteField>) -> u64 {
    let q = f.size() as u64;
    if f.has_sigma() {
        let e = (q as f64).sqrt().round() as u64;
        return (e.pow(3) + 1) * (e * e + 1);
    }
    if f.characteristic() == 2 {
        // h(v, v) is the square of a linear form, so Abs(h) is a plane.
        return q * q + q + 1;
    }
    if f.is_square(&space.gram().det(f)) {
        (q + 1) * (q + 1)
    } else {
        q * q + 1
    }
}

pub fn geometry(s: &Setup<FiniteField>, opts: &Options) -> Vec<Row> {
    let f = s.field();
    let space = s.space();
    if s.dim() != 4 || s.degree() != 2 {
        return vec![Row::skip("geometry", "lines of PG(3, F)", "needs n = 4 and degree 2")];
    }
    let q = f.size() as u64;
    let mut rows = vec![Row::compare("line-count", "lines of PG(3, q)", line_count(q), all_lines(f).len())];
    rows.push(match check_j_polarity(&s.hodge) {
        Err(e) => Row::fail("j-polarity", "J maps each line to its polar line", "all lines", e),
        Ok(r) => match &r.counterexample {
            None => Row::compare("j-polarity", "J maps each line to its polar line", r.lines_checked, r.lines_checked),
            Some(l) => Row::fail("j-polarity", "J maps each line to its polar line", r.lines_checked, format!("fails on {:?}", l.basis())),
        },
    });
    if q <= 4 {
        let ok = klein_incidence_holds(&s.hodge);
        rows.push(Row::holds("klein-incidence", "lines meet iff their Pfaffian vanishes", "all pairs", if ok { "all pairs" } else { "counterexample" }, ok));
    } else {
        rows.push(Row::skip("klein-incidence", "lines meet iff their Pfaffian vanishes", "exhaustive pair check limited to q <= 4"));
    }
    let abs_h = absolute_points_h(space).len();
    rows.push(Row::compare("abs-h-count", "absolute points of the polarity of h", isotropic_point_count(f, space), abs_h));

    let km = match KModule::new(s.hodge.clone()) {
        Ok(km) => km,
        Err(e) => return [rows, vec![Row::fail("lambda-fibers", "lambda: lines to K-points", "module", e)]].concat(),
    };
    if km.algebra().is_split() != Ternary::No {
        rows.push(Row::skip("lambda-fibers", "lambda: lines to K-points", "the K-point geometry assumes K is not split"));
        return rows;
    }
    match lambda_fibers(&km) {
        Err(e) => rows.push(Row::fail("lambda-fibers", "lambda: lines to K-points", "fibers", e)),
        Ok(r) => {
            let hist: Vec<_> = r.histogram.iter().map(|(size, n)| format!("{n}x{size}")).collect();
            let anchor = "lambda fibers are {L, L-perp} or the q+1 tangents at an absolute point";
            {
                let sizes_ok = r.histogram.keys().all(|&k| k == 2 || k == q as usize + 1);
                rows.push(Row::holds("lambda-fibers", anchor, format!("sizes in {{2, {}}}", q + 1), hist.join(", "), sizes_ok));
                rows.push(Row::holds("lambda-dichotomy", anchor, "holds", if r.dichotomy_holds { "holds" } else { "fails" }, r.dichotomy_holds));
            }
        }
    }
    let abs_g = absolute_points_g(&km).len();
    rows.push(Row::compare("abs-g-count", "absolute points of g correspond to those of h", abs_h, abs_g));
    let covered = absolute_points_covered(&km);
    rows.push(Row::holds("abs-g-in-image", "absolute points of g lie in lambda(lines)", "yes", if covered { "yes" } else { "no" }, covered));
    if !f.has_sigma() && f.characteristic() != 2 {
        let anchor = "half-turns generate a subgroup normalized by reflections";
        rows.push(match half_turn_subgroup(&km, opts.cap) {
            Err(e) => Row::fail("half-turns", anchor, "normalized", e),
            Ok(ht) => Row::holds(
                "half-turns",
                anchor,
                "normalized",
                format!("{} (order {})", if ht.normalized_by_reflections { "normalized" } else { "not normalized" }, ht.group.order()),
                ht.normalized_by_reflections,
            ),
        });
    }
    rows
}

// ---------------------------------------------------------------------------
// groups

fn group_fail(id: &str, anchor: &str, expected: impl std::fmt::Display, e: GroupError) -> Row {
    Row::fail(id, anchor, expected, e)
}

pub fn groups(s: &Setup<FiniteField>, opts: &Options) -> Vec<Row> {
    let f = s.field();
    let space = s.space();
    if s.dim() != 4 || s.degree() != 2 {
        return vec![Row::skip("groups", "finite group orders", "needs n = 4 and degree 2")];
    }
    let q = f.size() as u64;
    if f.has_sigma() {
        return unitary_groups(s, opts);
    }
    if f.characteristic() == 2 || s.hodge.algebra().is_split() != Ternary::No {
        return vec![Row::skip("groups", "finite group orders", "group comparisons cover hermitian forms and minus-type quadratic forms")];
    }
    if q > 5 {
        return vec![Row::skip("groups", "finite group orders", "isometry enumeration limited to q <= 5")];
    }
    let mut rows = Vec::new();
    let iso = enumerate_isometries(space);
    rows.push(Row::compare("o-order", "order of O4-(q)", order_formula(Family::Ominus4, q), iso.len()));
    let so = match special_group(space, opts.cap) {
        Ok(g) => g,
        Err(e) => return [rows, vec![group_fail("so-order", "order of SO4-(q)", order_formula(Family::SOminus4, q), e)]].concat(),
    };
    rows.push(Row::compare("so-order", "order of SO4-(q)", order_formula(Family::SOminus4, q), so.order()));
    let eo = match eo_subgroup(space, opts.cap) {
        Ok(g) => g,
        Err(e) => return [rows, vec![group_fail("eo-order", "order of EO4-(q)", order_formula(Family::EOminus4, q), e)]].concat(),
    };
    rows.push(Row::compare("eo-order", "order of EO4-(q), generated by Eichler maps", order_formula(Family::EOminus4, q), eo.order()));
    let inside = eo.iter().all(|x| so.contains(&x));
    rows.push(Row::holds("eo-in-so", "EO is a subgroup of SO", "yes", if inside { "yes" } else { "no" }, inside));
    let minus = SemiMap::linear(Matrix::identity(f, 4).scale(f, &f.from_int(-1)));
    rows.push(Row::info("minus-id-in-eo", "-id in EO", if eo.contains(&minus) { "yes" } else { "no" }));

    let anchor = "spinor-norm kernel equals EO";
    let mut kernel = Vec::new();
    let mut spinor_error = None;
    for m in so.iter() {
        match spinor_norm(space, &m.matrix) {
            Ok(x) if f.is_one(&x) => kernel.push(so.codec().encode(&m)),
            Ok(_) => {}
            Err(e) => {
                spinor_error = Some(e);
                break;
            }
        }
    }
    rows.push(match spinor_error {
        Some(e) => group_fail("spinor-kernel", anchor, eo.order(), e),
        None => {
            let same = kernel.len() == eo.order() && kernel.iter().all(|k| eo.keys().contains(k));
            Row::holds("spinor-kernel", anchor, format!("{} elements, equal to EO", eo.order()), format!("{} elements{}", kernel.len(), if same { ", equal to EO" } else { "" }), same)
        }
    });

    let km = match KModule::new(s.hodge.clone()) {
        Ok(km) => km,
        Err(e) => return [rows, vec![Row::fail("eta-so-image-order", "eta", "module", e)]].concat(),
    };
    let k = km.algebra();
    let psl = order_formula(Family::PSL2, q * q);
    for (id, g, name) in [("eta-so-image-order", &so, "SO"), ("eta-eo-image-order", &eo, "EO")] {
        let anchor = format!("eta({name}) is PSL2(q^2)");
        rows.push(match image_under_eta(&km, g, opts.cap) {
            Ok(img) => Row::compare(id, &anchor, psl, img.order()),
            Err(e) => group_fail(id, &anchor, psl, e),
        });
    }
    let mut kernel = 0;
    for m in so.iter() {
        match km.eta(&m) {
            Ok(e) => kernel += usize::from(e.map.is_identity(k)),
            Err(e) => return [rows, vec![Row::fail("eta-kernel", "kernel of eta on SO is {+-id}", 2, e)]].concat(),
        }
    }
    rows.push(Row::compare("eta-kernel", "kernel of eta on SO is {+-id}", 2, kernel));
    let v = space.orthogonal_basis().vectors[3].clone();
    let rho = SemiMap::linear(reflection_matrix(space, &v));
    rows.push(match km.eta(&rho) {
        Err(e) => Row::fail("eta-reflection", "eta of a reflection is not in SO(W, g)", "outside SO(W, g)", e),
        Ok(er) => {
            let special = k_determinant(k, &er.map.matrix) == k.one() && er.map.psi.is_identity(f);
            Row::holds(
                "eta-reflection",
                "eta of a reflection is not in SO(W, g)",
                "outside SO(W, g)",
                if special { "inside SO(W, g)" } else { "outside SO(W, g)" },
                !special,
            )
        }
    });
    rows
}

fn unitary_groups(s: &Setup<FiniteField>, opts: &Options) -> Vec<Row> {
    let f = s.field();
    let space = s.space();
    let e = (f.size() as f64).sqrt().round() as u64;
    let su_formula = order_formula(Family::SU4, e);
    let anchor = "SU4(e) generated by transvections";
    if e > 3 {
        return vec![Row::skip("su4-order", anchor, "closure beyond desk scale for e > 3")];
    }
    if e == 3 && !opts.long {
        return vec![Row::skip("su4-order", anchor, "order 13063680 runs only in the long profile (--long)")];
    }
    let pool = match isotropic_transvections(space) {
        Ok(p) => p,
        Err(err) => return vec![group_fail("su4-order", anchor, su_formula, err)],
    };
    let codec = match MapCodec::new(f.clone(), 4) {
        Ok(c) => c,
        Err(err) => return vec![group_fail("su4-order", anchor, su_formula, err)],
    };
    let su = match generate_from_pool(codec, pool, opts.cap) {
        Ok(g) => g,
        Err(err) => return vec![group_fail("su4-order", anchor, su_formula, err)],
    };
    let mut rows = vec![Row::compare("su4-order", anchor, su_formula, su.order())];
    if e == 2 {
        rows.push(match eo_subgroup(space, opts.cap) {
            Ok(eu) => Row::compare("eu-equals-su", "EU generated by Eichler maps equals SU", su.order(), eu.order()),
            Err(err) => group_fail("eu-equals-su", "EU generated by Eichler maps equals SU", su.order(), err),
        });
    }
    let km = match KModule::split(space.clone(), s.top().clone(), 2) {
        Ok(km) => km,
        Err(err) => return [rows, vec![Row::fail("eta-o-image-order", "eta^o", "split module", err)]].concat(),
    };
    let kernel = if e % 2 == 1 { 2 } else { 1 };
    let img = match image_under_eta_o(&km, &su, opts.cap) {
        Ok(img) => img,
        Err(err) => return [rows, vec![group_fail("eta-o-image-order", "eta^o(SU)", su.order() / kernel, err)]].concat(),
    };
    rows.push(Row::compare("eta-o-image-order", "eta^o(SU) has order |SU| / |SU meet {+-id}|", su.order() / kernel, img.order()));
    if e == 2 {
        rows.push(Row::compare("eta-o-vs-ominus6", "eta^o(SU4(2)) has index 2 in O6-(2)", order_formula(Family::Ominus6, 2) / 2, img.order() as u128));
    }
    let gram = match km.g_o_gram() {
        Ok(g) => g,
        Err(err) => return [rows, vec![Row::fail("eta-o-preserves-pq", "eta^o preserves the Klein form on Wz", "all generators", err)]].concat(),
    };
    let good = img.generators().iter().filter(|m| m.transpose().mul(f, &gram).mul(f, m) == gram).count();
    rows.push(count_row("eta-o-preserves-pq", "eta^o preserves the polar Klein form on Wz", good, img.generators().len()));
    rows
}

// ---------------------------------------------------------------------------
// rational-examples

fn rational_space(d: &[i64]) -> HermitianSpace<Rationals> {
    let v: Vec<_> = d.iter().map(|&x| rat(x, 1)).collect();
    HermitianSpace::diagonal(Rationals, &v).expect("fixed nondegenerate corpus")
}

fn rational_module(space: &HermitianSpace<Rationals>) -> KModule<Rationals> {
    let h = HodgeOperator::new(space.clone(), TopForm::standard(&Rationals), 2).expect("fixed corpus");
    KModule::new(h).expect("fixed corpus")
}

pub fn rational_examples() -> Vec<Row> {
    let q = Rationals;
    let mut rows = Vec::new();

    let h1 = rational_space(&[1, 2, 10, -5]);
    let km = rational_module(&h1);
    let k = km.algebra();
    let class = |s: &HermitianSpace<Rationals>| match q.square_class(&s.gram().det(&q)) {
        Ok(c) => q.format(&c),
        Err(e) => e.to_string(),
    };
    rows.push(Row::compare("disc-class-h1", "h1 = diag(1, 2, 10, -5): discriminant square class", "-1", class(&h1)));
    let anchor = "h1 is anisotropic: integral descent certificate";
    rows.push(match h1.anisotropy_certificate() {
        None => Row::fail("anisotropy-h1", anchor, "certified", "no certificate"),
        Some(c) => {
            let ok = descent_holds(&c.coefficients, c.prime, c.modulus);
            Row::holds("anisotropy-h1", anchor, "certified", format!("certified: p = {}, modulus {}", c.prime, c.modulus), ok)
        }
    });
    rows.push(Row::compare("k-split-h1", "K for h1 is not split", Ternary::No, k.is_split()));
    rows.push(Row::info("k-kind-h1", "K for h1", k.kind()));
    let e = |a: usize, b: usize| ExtVector::basis(&q, 4, mask_of(&[a, b]));
    let w = e(1, 3)
        .scale(&q, &rat(10, 1))
        .sub(&q, &km.k_action(&e(1, 4), &KElem::new(rat(10, 1), rat(1, 1))));
    let (a, b) = km.g_form_paths(&w, &w);
    rows.push(Row::holds("g-ww-two-paths", "g(w, w) by J and j^-1 versus by the Pfaffian", k.format(&a), k.format(&b), a == b));
    let zero = k.is_zero(&b);
    rows.push(Row::new(
        "g-ww-zero",
        "reference value g(w, w) = 0 for w = 10 e13 - e14 (10 + j), recorded only",
        "0",
        k.format(&b),
        if zero { Status::Matched } else { Status::Mismatched },
    ));

    match rational_plane_comparison() {
        Err(err) => rows.push(Row::fail("plane-comparison", "two planes with equal g-values", "comparison", err)),
        Ok(p) => {
            let anchor = "planes L1 = <e1, e2> and L2 = <e3, (1/2, 0, 0, 1/10)> in h1";
            rows.push(Row::compare("plane-g-values", anchor, "2, 2", format!("{}, {}", q.format(&p.g_l1), q.format(&p.g_l2))));
            rows.push(Row::compare(
                "plane-discriminants",
                "det of h on L1, L1-perp, L2",
                "2, -50, 2",
                format!("{}, {}, {}", q.format(&p.disc_l1), q.format(&p.disc_l1_perp), q.format(&p.disc_l2)),
            ));
            let value = if p.five_in_l2.is_empty() { "none".to_string() } else { q.format(&h1.evaluate_h(&p.five_in_l2, &p.five_in_l2)) };
            rows.push(Row::compare("five-in-h-l2", "5 is represented by h on L2", "5", value));
            rows.push(Row::holds(
                "five-not-in-h-l1",
                "5 is not represented by h on L1 (descent mod 25)",
                "certified",
                if p.five_not_in_l1 { "certified" } else { "not certified" },
                p.five_not_in_l1,
            ));
            let ok = p.not_isometric();
            rows.push(Row::holds("planes-not-isometric", "h on L2 is isometric to neither h on L1 nor on L1-perp", "yes", if ok { "yes" } else { "no" }, ok));
            rows.push(Row::holds(
                "planes-distinct-points",
                "equal g-values, distinct lambda-points",
                "yes",
                if p.distinct_points { "yes" } else { "no" },
                p.distinct_points,
            ));
        }
    }

    let h2 = rational_space(&[1, -2, 3, -6]);
    let km2 = rational_module(&h2);
    rows.push(Row::compare("disc-class-h2", "h2 = diag(1, -2, 3, -6): discriminant square class", "1", class(&h2)));
    rows.push(Row::compare("k-split-h2", "K for h2 is split", Ternary::Yes, km2.algebra().is_split()));
    let hodge = km2.hodge();
    let len = ExtBasis::new(4, 2).len();
    let witness = (1..3usize.pow(len as u32))
        .map(|mut code| {
            let coeffs: Vec<_> = (0..len)
                .map(|_| {
                    let c = (code % 3) as i64 - 1;
                    code /= 3;
                    rat(c, 1)
                })
                .collect();
            ExtVector::from_coeffs(4, 2, coeffs)
        })
        .find(|x| !x.is_zero(&q) && hodge.ext_h(x, x) == rat(0, 1));
    let anchor = "Lambda^2 h2 is isotropic";
    rows.push(match witness {
        Some(x) => Row::holds("ext2-isotropic-h2", anchor, "nonzero X with h(X, X) = 0", format!("X = {}", x.display(&q)), true),
        None => Row::fail("ext2-isotropic-h2", anchor, "nonzero X with h(X, X) = 0", "none with coefficients in {-1, 0, 1}"),
    });
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{FormSpec, GramSpec};
    use hodge_core::scalars::Involution;

    fn setup<F: Field>(f: F, diag: &[&str], degree: usize) -> Setup<F> {
        let form = FormSpec {
            gram: GramSpec::Diagonal(diag.iter().map(|s| s.to_string()).collect()),
            degree,
            b0: "1".into(),
        };
        Setup::build(f, &form).unwrap()
    }

    fn no_failures(rows: &[Row]) {
        for r in rows {
            assert_ne!(r.status, Status::Fail, "{r:?}");
        }
    }

    const OPTS: Options = Options { long: false, cap: 2_000_000 };

    #[test]
    fn identities_over_several_fields() {
        no_failures(&hodge_identities(&setup(Rationals, &["1", "2", "-3"], 1)));
        no_failures(&hodge_identities(&setup(FiniteField::new(9, Involution::Galois).unwrap(), &["1", "1", "2", "2"], 2)));
        no_failures(&algebra_classify(&setup(FiniteField::new(4, Involution::Identity).unwrap(), &["1", "1", "1", "1"], 2)));
        no_failures(&algebra_classify(&setup(FiniteField::prime(3).unwrap(), &["1", "1", "1", "-1"], 2)));
    }

    #[test]
    fn split_reductions_cover_each_case() {
        let rows = split_reductions(&setup(FiniteField::prime(5).unwrap(), &["1", "2", "1", "2"], 2));
        no_failures(&rows);
        assert!(rows.iter().any(|r| r.check_id == "g-on-wp" && r.status == Status::Pass));
        let rows = split_reductions(&setup(FiniteField::new(4, Involution::Identity).unwrap(), &["1", "1", "1", "1"], 2));
        assert!(rows.iter().any(|r| r.check_id == "g-on-wz-vanishes" && r.status == Status::Pass));
        let rows = split_reductions(&setup(FiniteField::prime(3).unwrap(), &["1", "1", "1", "-1"], 2));
        assert_eq!(rows[0].status, Status::Skip);
    }

    #[test]
    fn norm_similarity_cases() {
        for (f, d) in [
            (FiniteField::new(9, Involution::Galois).unwrap(), ["1", "1", "1", "1"]),
            (FiniteField::new(4, Involution::Galois).unwrap(), ["1", "1", "1", "1"]),
            (FiniteField::prime(5).unwrap(), ["1", "2", "3", "1"]),
        ] {
            let rows = norm_similarity(&setup(f, &d, 2));
            no_failures(&rows);
            assert!(rows.iter().any(|r| r.status == Status::Pass), "{rows:?}");
        }
    }

    #[test]
    fn geometry_and_groups_over_f3() {
        let s = setup(FiniteField::prime(3).unwrap(), &["1", "1", "1", "-1"], 2);
        let rows = geometry(&s, &OPTS);
        no_failures(&rows);
        assert!(rows.iter().any(|r| r.check_id == "abs-h-count" && r.actual == "10"));
        let rows = groups(&s, &OPTS);
        no_failures(&rows);
        assert!(rows.iter().any(|r| r.check_id == "eta-so-image-order" && r.actual == "360"));
    }

    #[test]
    fn rational_corpus() {
        let rows = rational_examples();
        no_failures(&rows);
        let published = rows.iter().find(|r| r.check_id == "g-ww-zero").unwrap();
        assert_eq!(published.status, Status::Mismatched);
    }
}
