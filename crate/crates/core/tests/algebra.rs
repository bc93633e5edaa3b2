use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::Rational64;
use proptest::prelude::*;
use rdito::algebra::*;

const P0: PositionId = PositionId(0);
const SP: Species = Species(0);

fn c(i: u32) -> FieldOp {
    FieldOp::create(SP, Var::Bound(i))
}

fn n(i: u32) -> FieldOp {
    FieldOp::annihilate(SP, Var::Bound(i))
}

fn full(ids: &[u32]) -> BTreeMap<u32, Region> {
    ids.iter().map(|i| (*i, Region::Full)).collect()
}

fn term(num: Rational64, factors: Vec<KernelFactor>, ops: Vec<FieldOp>, bound: BTreeMap<u32, Region>) -> OperatorTerm {
    OperatorTerm::new(CoeffKernel { numeric: num, factors }, ops, bound)
}

fn kf(k: &Arc<KernelSymbol>, vars: &[u32]) -> KernelFactor {
    KernelFactor::new(k, &vars.iter().map(|i| Var::Bound(*i)).collect::<Vec<_>>())
}

fn rat(a: i64, b: i64) -> Rational64 {
    Rational64::new(a, b)
}

fn fam(f: Family, k: &str) -> OperatorExpr {
    let sym = match f {
        Family::Xi | Family::Omega | Family::OmegaCubic => KernelSymbol::radial(k),
        Family::A | Family::Adag | Family::X | Family::Y => KernelSymbol::scalar(k),
        _ => KernelSymbol::operator(k, false, &[]),
    };
    f.instantiate(&[sym], P0)
}

fn as_instance(e: &OperatorExpr, prefer: &[Family]) -> FamilyInstance {
    match recognize(e, prefer) {
        Recognized::Instance(i) => i,
        other => panic!("expected a family instance, got {other}"),
    }
}

#[test]
fn single_contraction_gives_two_terms() {
    let f = KernelSymbol::scalar("f");
    let g = KernelSymbol::scalar("g");
    let e = OperatorExpr::from_term(term(rat(1, 1), vec![kf(&f, &[0]), kf(&g, &[1])], vec![n(0), c(1)], full(&[0, 1])));
    let out = normal_order(&e).unwrap();
    assert_eq!(out.terms.len(), 2);
    let normal = out.terms.iter().find(|t| t.ops.len() == 2).unwrap();
    assert_eq!(normal.ops[0].dagger, true);
    assert_eq!(normal.ops[1].dagger, false);
    let scalar = out.terms.iter().find(|t| t.ops.is_empty()).unwrap();
    assert_eq!(scalar.bound.len(), 1);
    assert_eq!(scalar.coeff.factors.len(), 2);
}

#[test]
fn normal_term_is_unchanged() {
    let e = OperatorExpr::from_term(term(rat(1, 1), vec![], vec![c(0), n(0)], full(&[0])));
    assert_eq!(normal_order(&e).unwrap(), simplify(&e));
    assert_eq!(wick_expand(&e, WickConfig::default()).unwrap().len(), 1);
}

#[test]
fn undeclared_variables_are_rejected() {
    let e = OperatorExpr::from_term(term(rat(1, 1), vec![], vec![c(0), n(1)], full(&[0])));
    assert_eq!(normal_order(&e), Err(AlgebraError::UnboundVariable(Var::Bound(1))));
    let free = OperatorExpr::from_term(OperatorTerm::new(
        CoeffKernel::one(),
        vec![FieldOp::annihilate(SP, Var::Free(0))],
        BTreeMap::new(),
    ));
    assert!(normal_order(&free).is_err());
    assert!(normal_order(&free.with_free(0, "x")).is_ok());
}

#[test]
fn operator_cap_is_enforced() {
    let ops: Vec<FieldOp> = (0..9).map(c).chain((0..9).map(n)).collect();
    let e = OperatorExpr::from_term(term(rat(1, 1), vec![], ops, full(&(0..9).collect::<Vec<_>>())));
    assert_eq!(normal_order(&e), Err(AlgebraError::ContractionOverflow { ops: 18, max: 16 }));
    assert!(normal_order_with(&e, WickConfig { max_ops: 18 }).is_ok());
}

fn xi_full(k: &Arc<KernelSymbol>) -> OperatorExpr {
    Family::Xi.instantiate_full(&[k.clone()])
}

#[test]
fn xi_product_has_seven_contractions_in_three_groups() {
    let r = KernelSymbol::radial("R");
    let s = KernelSymbol::radial("S");
    let prod = xi_full(&r).mul(&xi_full(&s));
    let raw = wick_expand(&prod, WickConfig::default()).unwrap();
    assert_eq!(raw.len(), 7);
    let mut by_vars: BTreeMap<usize, usize> = BTreeMap::new();
    for t in &raw {
        *by_vars.entry(t.bound.len()).or_default() += 1;
    }
    assert_eq!(by_vars, BTreeMap::from([(2, 2), (3, 4), (4, 1)]));

    // the displayed three-term grouping, written out by hand
    let expected = OperatorExpr::from_terms(vec![
        term(
            rat(1, 4),
            vec![kf(&r, &[0, 1]), kf(&s, &[2, 3])],
            vec![c(0), c(1), c(2), c(3), n(0), n(1), n(2), n(3)],
            full(&[0, 1, 2, 3]),
        ),
        term(rat(1, 1), vec![kf(&r, &[0, 1]), kf(&s, &[1, 2])], vec![c(0), c(1), c(2), n(0), n(1), n(2)], full(&[0, 1, 2])),
        term(rat(1, 2), vec![kf(&r, &[0, 1]), kf(&s, &[0, 1])], vec![c(0), c(1), n(0), n(1)], full(&[0, 1])),
    ]);
    let got = normal_order(&prod).unwrap();
    assert_eq!(got.terms.len(), 3);
    assert_eq!(got, simplify(&expected));
}

#[test]
fn xi_differentials_multiply_to_xi() {
    let prod = ito_product(&fam(Family::Xi, "R"), &fam(Family::Xi, "S")).unwrap();
    let i = as_instance(&prod, &[Family::Xi]);
    assert_eq!(i.family, Family::Xi);
    assert_eq!(i.scale, rat(1, 1));
    assert_eq!(i.kernels.iter().map(|k| k.name.as_str()).collect::<Vec<_>>(), ["R", "S"]);
}

#[test]
fn birth_products_follow_the_coefficient_rule() {
    for m in 1..=4 {
        for k in 1..=4 {
            let prod = ito_product(&fam(Family::B(m), "G"), &fam(Family::B(k), "H")).unwrap();
            let i = as_instance(&prod, &[Family::B(m + k - 1)]);
            assert_eq!(i.family, Family::B(m + k - 1), "m={m} n={k}");
            assert_eq!(i.scale, rat(k as i64, 1), "m={m} n={k}");
        }
    }
}

#[test]
fn right_grouping_matches_full_expansion() {
    for l in 1..=3 {
        for m in 1..=3 {
            for k in 1..=3 {
                let xs = [fam(Family::B(l), "F"), fam(Family::B(m), "G"), fam(Family::B(k), "H")];
                let chain = ito_chain(&xs).unwrap();
                let brute = ito_product_many(&xs).unwrap();
                assert_eq!(simplify(&chain), brute);
                let i = as_instance(&brute, &[Family::B(l + m + k - 2)]);
                assert_eq!(i.family, Family::B(l + m + k - 2));
                assert_eq!(i.scale, rat((k * (m + k - 1)) as i64, 1));
            }
        }
    }
}

#[test]
fn products_are_not_associative() {
    let b2 = || fam(Family::B(2), "G");
    let left = ito_product(&ito_product(&b2(), &b2()).unwrap(), &b2()).unwrap();
    let right = ito_product(&b2(), &ito_product(&b2(), &b2()).unwrap()).unwrap();
    assert_eq!(as_instance(&left, &[]).scale, rat(4, 1));
    assert_eq!(as_instance(&right, &[]).scale, rat(6, 1));

    // with a gauge third factor both groupings happen to agree
    let lam = fam(Family::Lambda, "H");
    let left = ito_product(&ito_product(&b2(), &b2()).unwrap(), &lam).unwrap();
    let right = ito_product(&b2(), &ito_product(&b2(), &lam).unwrap()).unwrap();
    assert_eq!(as_instance(&left, &[]).scale, as_instance(&right, &[]).scale);
}

#[test]
fn gauge_inserts_its_position_factor() {
    // dB2 dB2 dΛ dB2 dB2 = 3·4! dB5
    let b = || fam(Family::B(2), "mu");
    let xs = [b(), b(), fam(Family::Lambda, "H"), b(), b()];
    let i = as_instance(&ito_chain(&xs).unwrap(), &[]);
    assert_eq!(i.family, Family::B(5));
    assert_eq!(i.scale, rat(72, 1));
}

#[test]
fn tables_match_golden_files() {
    let cases = [
        (&["Lambda", "A", "Adag", "dt"][..], include_str!("golden/table1.txt")),
        (&["M", "Lambda"][..], include_str!("golden/table2.txt")),
        (&["X", "Y"][..], include_str!("golden/table3.txt")),
    ];
    for (names, golden) in cases {
        let t = table_for(names).unwrap();
        assert!(t.all_recognized());
        assert_eq!(t.to_text(), golden);
        assert_eq!(table_for(names).unwrap(), t);
    }
}

#[test]
fn standard_table_entries() {
    use Family::*;
    let t = derive_table(&[Lambda, A, Adag, Dt]).unwrap();
    let zeros = [
        (Lambda, A),
        (Lambda, Dt),
        (A, A),
        (A, Dt),
        (Adag, Lambda),
        (Adag, A),
        (Adag, Adag),
        (Adag, Dt),
        (Dt, Lambda),
        (Dt, A),
        (Dt, Adag),
        (Dt, Dt),
    ];
    for (r, c) in zeros {
        assert_eq!(t.get(r, c), Some(&Recognized::Zero), "{r}·{c}");
    }
    assert_eq!(t.get(Lambda, Lambda).unwrap().to_string(), "dLambda[F·G]");
    assert_eq!(t.get(Lambda, Adag).unwrap().to_string(), "dAdag[F·g]");
    assert_eq!(t.get(A, Lambda).unwrap().to_string(), "dA[f·G]");
    match t.get(A, Adag).unwrap() {
        Recognized::ScalarDt { scale, kernels } => {
            assert_eq!(*scale, rat(1, 1));
            assert_eq!(kernels.len(), 2);
        }
        other => panic!("{other}"),
    }
}

#[test]
fn conversion_and_birth_death_tables() {
    use Family::*;
    let t = derive_table(&[M, Lambda]).unwrap();
    assert_eq!(t.get(M, M), Some(&Recognized::Zero));
    assert_eq!(t.get(Lambda, M), Some(&Recognized::Zero));
    assert_eq!(t.get(M, Lambda).unwrap().to_string(), "dM[F·G]");
    assert_eq!(t.get(Lambda, Lambda).unwrap().to_string(), "dLambda[F·G]");

    let t = derive_table(&[X, Y]).unwrap();
    assert_eq!(t.get(X, X), Some(&Recognized::Zero));
    assert_eq!(t.get(X, Y), Some(&Recognized::Zero));
    assert_eq!(t.get(Y, X).unwrap().to_string(), "-dX[mu·nu']");
    assert_eq!(t.get(Y, Y).unwrap().to_string(), "-dY[mu·mu']");
}

#[test]
fn mixed_dimension_products_are_unrecognized() {
    let prod = ito_product(&fam(Family::Xi, "R"), &fam(Family::Lambda, "G")).unwrap();
    assert!(matches!(recognize(&prod, &[]), Recognized::Unrecognized(_)));
}

#[test]
fn table_json_is_stable() {
    let a = table_for(&["M", "Lambda"]).unwrap().to_json();
    let b = table_for(&["M", "Lambda"]).unwrap().to_json();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(v[1]["result"], "dM[F·G]");
}

#[test]
fn doi_shift_of_annihilation_liouvillian() {
    let r = KernelSymbol::radial("R");
    let lap = KernelSymbol::operator("DDelta", true, &[]);
    let liouv = Family::Omega
        .instantiate_full(&[r.clone()])
        .sub(&Family::Xi.instantiate_full(&[r.clone()]))
        .add(&Family::Lambda.instantiate_full(&[lap.clone()]));
    let shifted = doi_shift(&liouv, SP);
    let expected = Family::Lambda
        .instantiate_full(&[lap])
        .sub(&Family::OmegaCubic.instantiate_full(&[r.clone()]))
        .sub(&Family::Xi.instantiate_full(&[r]));
    assert_eq!(shifted, simplify(&expected));
}

#[test]
fn doi_shift_simple_cases() {
    let only_a = OperatorExpr::from_term(term(rat(1, 1), vec![], vec![n(0)], full(&[0])));
    assert_eq!(doi_shift(&only_a, SP), simplify(&only_a));

    let number = OperatorExpr::from_term(term(rat(1, 1), vec![], vec![c(0), n(0)], full(&[0])));
    let expected = number.add(&only_a);
    assert_eq!(doi_shift(&number, SP), simplify(&expected));

    // other species untouched
    assert_eq!(doi_shift(&number, Species(1)), simplify(&number));
}

// --- independent oracles -------------------------------------------------

/// Normal ordering by repeated use of `a_x a†_y = a†_y a_x + δ(x−y)` on
/// adjacent pairs.
fn rewrite_oracle(t: &OperatorTerm) -> Vec<OperatorTerm> {
    let mut todo = vec![t.clone()];
    let mut done = Vec::new();
    while let Some(mut cur) = todo.pop() {
        let pos = (0..cur.ops.len().saturating_sub(1)).find(|&i| !cur.ops[i].dagger && cur.ops[i + 1].dagger);
        let Some(i) = pos else {
            done.push(cur);
            continue;
        };
        let (a, b) = (cur.ops[i], cur.ops[i + 1]);
        if a.species == b.species {
            let (Var::Bound(x), Var::Bound(y)) = (a.var, b.var) else { unreachable!() };
            let merged = if x == y { Some(cur.bound[&x]) } else { cur.bound[&x].meet(cur.bound[&y]) };
            if let Some(region) = merged {
                let mut ct = cur.clone();
                ct.ops.drain(i..=i + 1);
                if x != y {
                    let (keep, drop) = (x.min(y), x.max(y));
                    for o in ct.ops.iter_mut() {
                        if o.var == Var::Bound(drop) {
                            o.var = Var::Bound(keep);
                        }
                    }
                    for f in ct.coeff.factors.iter_mut() {
                        for v in f.vars.iter_mut() {
                            if *v == Var::Bound(drop) {
                                *v = Var::Bound(keep);
                            }
                        }
                    }
                    ct.bound.remove(&drop);
                    ct.bound.insert(keep, region);
                } else {
                    // second contraction between the same two points: δ(0)
                    ct.coeff.factors.push(kf(&KernelSymbol::radial("delta"), &[x, x]));
                }
                todo.push(ct);
            }
        }
        cur.ops.swap(i, i + 1);
        todo.push(cur);
    }
    done
}

fn random_term() -> impl Strategy<Value = OperatorTerm> {
    // each species gets its own pair of positions so that no chain of
    // contractions can close on itself
    let op = (any::<bool>(), 0u8..2, 0u32..2)
        .prop_map(|(d, s, v)| FieldOp { dagger: d, species: Species(s), var: Var::Bound(2 * s as u32 + v) });
    (prop::collection::vec(op, 0..=8), prop::collection::vec(0u32..3, 4)).prop_map(|(ops, regions)| {
        let mut ops = ops;
        // avoid self-contractions a_x … a†_x, which carry δ(0)
        let mut seen_ann = std::collections::BTreeSet::new();
        for o in ops.iter_mut() {
            if o.dagger && seen_ann.contains(&(o.species, o.var)) {
                o.dagger = false;
            }
            if !o.dagger {
                seen_ann.insert((o.species, o.var));
            }
        }
        let bound = (0..4u32)
            .map(|i| (i, if regions[i as usize] == 0 { Region::Full } else { Region::Infinitesimal(PositionId(regions[i as usize] - 1)) }))
            .collect();
        let h = KernelSymbol::scalar("h");
        let factors = (0..4u32).map(|i| kf(&h, &[i])).collect();
        term(rat(1, 1), factors, ops, bound)
    })
}

proptest! {
    #[test]
    fn wick_matches_pairwise_rewriting(t in random_term()) {
        let e = OperatorExpr::from_term(t.clone());
        let got = normal_order(&e).unwrap();
        let oracle = simplify(&OperatorExpr::from_terms(rewrite_oracle(&t)));
        prop_assert_eq!(got, oracle);
    }

    #[test]
    fn distinct_cells_commute(i in 0usize..6, j in 0usize..6) {
        let fams = [Family::A, Family::Adag, Family::Lambda, Family::B(2), Family::Xi, Family::Y];
        let k = |f: Family, name: &str| match f {
            Family::Xi => KernelSymbol::radial(name),
            _ => KernelSymbol::scalar(name),
        };
        let x = fams[i].instantiate(&[k(fams[i], "F")], PositionId(0));
        let y = fams[j].instantiate(&[k(fams[j], "G")], PositionId(1));
        prop_assert!(ito_product(&x, &y).unwrap().terms.is_empty());
        prop_assert!(ito_product(&y, &x).unwrap().terms.is_empty());
    }
}

/// Number of matchings in the complete bipartite graph K_{k,k}, by brute
/// force over all edge subsets.
fn brute_matchings(k: usize) -> usize {
    let edges: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    (0u32..(1 << edges.len()))
        .filter(|mask| {
            let chosen: Vec<_> = edges.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, e)| *e).collect();
            let mut l = vec![false; k];
            let mut r = vec![false; k];
            chosen.iter().all(|&(a, b)| {
                let ok = !l[a] && !r[b];
                l[a] = true;
                r[b] = true;
                ok
            })
        })
        .count()
}

#[test]
fn contraction_count_equals_matchings() {
    for k in 1..=4u32 {
        let mut ops: Vec<FieldOp> = (0..k).map(n).collect();
        ops.extend((k..2 * k).map(c));
        let e = OperatorExpr::from_term(term(rat(1, 1), vec![], ops, full(&(0..2 * k).collect::<Vec<_>>())));
        assert_eq!(wick_expand(&e, WickConfig::default()).unwrap().len(), brute_matchings(k as usize), "k={k}");
    }
}
