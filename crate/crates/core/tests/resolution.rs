//! Corpus-wide exactness checks on resolution trees: chart pullbacks,
//! Weierstrass reconstruction, order monotonicity on the exceptional
//! divisor, gamma descent, termination bounds, and the change-of-variables
//! law for volumes.

use hardy_forge_core::blowup::{
    apply_chart, resolve, weierstrass_split, Chart, ResolutionTree,
};
use hardy_forge_core::fixtures;
use hardy_forge_core::poly::{parse, Polynomial, RationalPoint};
use hardy_forge_core::profile::RadialBump;
use hardy_forge_core::quad::build_grid;
use hardy_forge_core::scalar::Rat;
use num_traits::Zero;

fn resolved_corpus() -> Vec<(String, ResolutionTree)> {
    let mut out = Vec::new();
    for name in ["cross", "circle", "cusp", "cubic", "smooth"] {
        let p = fixtures::get(name).unwrap();
        let origin = RationalPoint::origin(p.nvars());
        out.push((
            name.to_string(),
            resolve(&p, &origin, 512).unwrap(),
        ));
    }
    // The cubic again at a point of its singular axis.
    let cubic = fixtures::get("cubic").unwrap();
    out.push((
        "cubic@axis".into(),
        resolve(&cubic, &RationalPoint::from_i64(&[1, 0, 0]), 512).unwrap(),
    ));
    // A two-year generation.
    let flat_cusp = parse("x2^2-x1^5", 2).unwrap();
    out.push((
        "flat-cusp".into(),
        resolve(&flat_cusp, &RationalPoint::origin(2), 512).unwrap(),
    ));
    out
}

#[test]
fn every_edge_is_bit_exact() {
    for (name, tree) in resolved_corpus() {
        assert!(tree.is_fully_resolved(), "{name} left unresolved leaves");
        for node in &tree.nodes {
            for &c in &node.children {
                let child = &tree.nodes[c];
                let chart = child.chart.as_ref().unwrap();
                let (total, strict) = apply_chart(&node.poly, chart, node.mult).unwrap();
                assert_eq!(strict, child.poly, "{name}: strict transform mismatch");
                let divisor = Polynomial::var(chart.nvars, chart.chart_index)
                    .unwrap()
                    .pow(node.mult);
                assert_eq!(
                    total,
                    &divisor * &child.poly,
                    "{name}: total != divisor^m * strict"
                );
            }
        }
    }
}

#[test]
fn weierstrass_reconstruction_is_exact_on_expanded_nodes() {
    for (name, tree) in resolved_corpus() {
        for node in tree.nodes.iter().filter(|n| !n.children.is_empty()) {
            let w = weierstrass_split(&node.poly, node.mult).unwrap();
            assert_eq!(w.reconstruct(), w.prepared, "{name}");
            assert_eq!(w.prepared, node.poly, "{name}: node not in prepared form");
            if !w.translation_skipped {
                assert!(w.coeffs[node.mult as usize - 1].is_zero(), "{name}");
            }
        }
    }
}

#[test]
fn order_never_increases_on_the_exceptional_divisor() {
    // Exact orders at the chart origin and at 100 rational points of the
    // divisor per chart.
    let fractions: Vec<Rat> = (1..=10)
        .flat_map(|n: i64| {
            [
                Rat::new(n.into(), 7.into()),
                Rat::new((-n).into(), 9.into()),
            ]
        })
        .collect();
    for (name, tree) in resolved_corpus() {
        for node in &tree.nodes {
            for &c in &node.children {
                let child = &tree.nodes[c];
                assert!(child.mult <= node.mult, "{name}: order grew on an edge");
                let chart = child.chart.as_ref().unwrap();
                let n = chart.nvars;
                let k = chart.chart_index;
                let mut checked = 0;
                'outer: for i in 0..fractions.len() {
                    for j in 0..fractions.len() {
                        if checked >= 100 {
                            break 'outer;
                        }
                        // A rational point on {y_k = 0}.
                        let mut coords = vec![Rat::zero(); n];
                        let mut fi = i;
                        for d in 1..=n {
                            if d == k {
                                continue;
                            }
                            coords[d - 1] = fractions[(fi + j) % fractions.len()].clone();
                            fi += 3;
                        }
                        let q = RationalPoint(coords);
                        let ord = child.poly.order_at(&q).unwrap();
                        assert!(
                            ord <= node.mult,
                            "{name}: order {ord} > {} at divisor point",
                            node.mult
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
}

#[test]
fn gamma_descent_and_termination_bounds() {
    for (name, tree) in resolved_corpus() {
        // Per-generation years stay within |gamma| * m!.
        for g in &tree.generations {
            assert!(
                u64::from(g.years) <= g.bound,
                "{name}: generation m={} used {} years, bound {}",
                g.mult,
                g.years,
                g.bound
            );
        }
        // Descent rule on edges that continue a generation.
        for node in &tree.nodes {
            let Some(gamma) = &node.gamma else { continue };
            for &c in &node.children {
                let child = &tree.nodes[c];
                if child.mult != node.mult || child.gamma.is_none() {
                    continue;
                }
                if !node.coord_changes.is_empty() && node.parent.is_some() {
                    continue;
                }
                let chart = child.chart.as_ref().unwrap();
                let j = chart.chart_index;
                let n = chart.nvars;
                if j == n {
                    continue;
                }
                let in_center: Vec<usize> =
                    chart.blown.iter().copied().filter(|&i| i != n).collect();
                let sum: Rat = in_center.iter().map(|&i| gamma[i - 1].clone()).sum();
                let mut expected = gamma.clone();
                expected[j - 1] = sum.clone() - Rat::from_integer(1.into());
                let child_gamma = child.gamma.clone().unwrap();
                assert_eq!(
                    child_gamma, expected,
                    "{name}: gamma descent mismatch in chart {j}"
                );
                // While the generation continues, 1 <= |gamma'| < |gamma|.
                let total: Rat = child_gamma.iter().cloned().sum();
                let parent_total: Rat = gamma.iter().cloned().sum();
                assert!(total < parent_total, "{name}: |gamma| did not drop");
            }
        }
    }
}

#[test]
fn euler_identity_exact_on_homogeneous_fixtures() {
    for name in ["cross", "circle", "cubic"] {
        let p = fixtures::get(name).unwrap();
        let d = p.degree().unwrap();
        let diff = &p.euler_apply() - &p.scale(&Rat::from_integer(d.into()));
        assert!(diff.is_zero(), "{name}");
    }
}

#[test]
fn volume_change_of_variables_through_charts() {
    // For a bump g supported where the chart is a diffeomorphism, the
    // ambient integral of g equals the chart integral of (g o sigma) |y_k|^(c-1).
    let chart = Chart::new(2, vec![1, 2], 1);
    let bumps = [
        (vec![0.7, 0.3], 0.22),
        (vec![0.9, -0.4], 0.28),
        (vec![0.55, 0.15], 0.18),
    ];
    for (center, radius) in bumps {
        let g = move |x: &[f64]| {
            let t = x
                .iter()
                .zip(&center)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                / radius;
            RadialBump.value(t)
        };
        let ambient_bounds = [(0.05, 1.5), (-1.2, 1.2)];
        let ambient_grid =
            build_grid(&ambient_bounds, None, 8, Some((1e-4, &g))).unwrap();
        let ambient = ambient_grid.integrate(&g).unwrap();

        let pulled = |y: &[f64]| {
            let x = chart.map_point(y);
            g(&x) * y[0].abs()
        };
        let chart_bounds = [(0.05, 1.5), (-1.6, 1.6)];
        let chart_grid =
            build_grid(&chart_bounds, None, 8, Some((1e-4, &pulled))).unwrap();
        let chart_side = chart_grid.integrate(&pulled).unwrap();

        let rel = (ambient - chart_side).abs() / ambient.abs();
        assert!(
            rel <= 1e-3,
            "volume pullback: ambient {ambient} vs chart {chart_side} (rel {rel})"
        );
    }
}

#[test]
fn unresolved_budget_is_reported_honestly() {
    let cusp = fixtures::get("cusp").unwrap();
    let tree = resolve(&cusp, &RationalPoint::origin(2), 2).unwrap();
    assert!(tree.budget_exhausted);
    assert!(!tree.is_fully_resolved());
}
