//! Frozen reference values computed once with the standard Python
//! toolchain (networkx 3.x, statsmodels 0.14, scipy 1.x) on inputs that
//! are bit-identical on both sides: integer-derived grids, exactly
//! representable decimals, and a hardcoded outcome bitstring.

use swbnet::graph::Network;
use swbnet::metrics::{eigenvector_centrality, gini, transitivity};
use swbnet::stats::{logistic_fit, mediate, welch_t};

fn reference_graph() -> Network {
    Network::from_edges(
        10,
        &[
            (0, 1),
            (0, 3),
            (0, 7),
            (1, 2),
            (1, 5),
            (1, 8),
            (2, 3),
            (2, 9),
            (3, 4),
            (3, 6),
            (4, 5),
            (4, 9),
            (5, 6),
            (6, 7),
            (7, 8),
            (8, 9),
            (0, 9),
            (2, 6),
        ],
    )
    .unwrap()
}

#[test]
fn transitivity_matches_networkx() {
    assert_eq!(transitivity(&reference_graph()), 0.0625);
}

#[test]
fn eigenvector_centrality_matches_networkx() {
    // networkx.eigenvector_centrality_numpy, max-normalized.
    let expected = [
        0.9401057196471161,
        0.8982179588180976,
        1.0,
        0.9644124002081238,
        0.6935806517938011,
        0.6806728160029106,
        0.9076223923086566,
        0.6876914375984398,
        0.6774651707076877,
        0.901733178113295,
    ];
    let cv = eigenvector_centrality(&reference_graph());
    for (u, &want) in expected.iter().enumerate() {
        assert!(
            (cv[u] - want).abs() < 1e-8,
            "node {u}: {} vs networkx {want}",
            cv[u]
        );
    }
}

#[test]
fn gini_matches_numpy_pairwise_sum() {
    let mut wealth = vec![1_150.0; 4];
    wealth.extend(vec![200.0; 9]);
    assert!((gini(&wealth).unwrap() - 0.4110576923076923).abs() < 1e-12);
}

#[test]
fn logistic_fit_matches_statsmodels() {
    // y ~ 1 + x1 + x2 with x1 = (i % 10) - 4.5, x2 = (i/10 - 4.5)/4, and
    // outcomes drawn once offline from a logit(0.5 + 0.8 x1 - 1.2 x2)
    // model. statsmodels.Logit, Newton, tol 1e-12.
    let bits = "1011111111010001111101111111110101111111000110111100000011110001\
                001111000001111101001011110000011111";
    let bits: String = bits.chars().filter(|c| !c.is_whitespace()).collect();
    assert_eq!(bits.len(), 100);

    let outcome: Vec<bool> = bits.chars().map(|c| c == '1').collect();
    let design: Vec<Vec<f64>> = (0..100)
        .map(|i| {
            let x1 = (i % 10) as f64 - 4.5;
            let x2 = ((i / 10) as f64 - 4.5) * 0.25;
            vec![1.0, x1, x2]
        })
        .collect();

    let fit = logistic_fit(&outcome, &design).unwrap();
    assert!(fit.converged);
    let want_coef = [1.1420945135489409, 0.8277930849381717, -1.4402455771623899];
    let want_se = [0.352166278468346, 0.16391219435618803, 0.4803130907124309];
    for j in 0..3 {
        assert!(
            (fit.coefficients[j] - want_coef[j]).abs() < 1e-7,
            "coef {j}: {} vs {}",
            fit.coefficients[j],
            want_coef[j]
        );
        assert!(
            (fit.std_errors[j] - want_se[j]).abs() < 1e-7,
            "se {j}: {} vs {}",
            fit.std_errors[j],
            want_se[j]
        );
    }
    assert!((fit.log_likelihood - -35.32362427615593).abs() < 1e-8);
}

#[test]
fn welch_t_matches_scipy() {
    let a = [12.5, 14.25, 11.75, 15.0, 13.5, 12.0, 16.25, 14.0];
    let b = [10.25, 11.5, 9.75, 12.25, 10.0, 11.25, 9.5];
    let r = welch_t(&a, &b).unwrap();
    assert!((r.t - 4.4904637326781485).abs() < 1e-10, "t = {}", r.t);
    assert!((r.p - 0.0007058155998665814).abs() < 1e-10, "p = {}", r.p);
}

#[test]
fn mediation_point_estimates_match_statsmodels_ols() {
    let x: Vec<f64> = (0..60).map(|i| (i % 2) as f64).collect();
    let z = vec![
        -0.062558, 0.415936, -0.444791, 1.029007, -0.495555, 1.189295, 0.202476, 0.722159,
        -0.044702, 1.114198, 0.315395, 0.87437, 0.217007, 1.085949, 0.158738, 0.524869, 0.058711,
        0.647683, 0.27963, 0.467797, 0.300059, 1.127486, -0.376119, 1.032935, 0.285446, 0.529747,
        -0.43578, 1.034125, -0.055388, 0.858193, 0.436788, 0.888597, -0.419543, 1.25075, 0.319405,
        1.124715, 0.351229, 0.972334, -0.34451, 0.67302, -0.220684, 0.838678, -0.149132, 1.293195,
        0.472303, 0.631894, -0.152986, 0.56169, 0.203167, 1.320359, -0.183197, 1.197404, -0.271946,
        1.391732, 0.416184, 0.821759, 0.227942, 1.32537, -0.407417, 0.503712,
    ];
    let y = vec![
        0.342315, 0.997751, -0.132838, 1.07448, -0.582176, 0.953993, 0.152946, 0.927068, 0.304275,
        0.750974, 0.5312, 0.823745, 0.333414, 0.546409, 0.299969, 0.993022, -0.210557, 0.589237,
        -0.013424, 0.676925, -0.076329, 1.30781, -0.034438, 1.308754, -0.235219, 0.302734,
        -0.64507, 0.572535, -0.271328, 0.422266, 0.449497, 1.034113, -0.441348, 0.57335, 0.498332,
        1.157213, -0.203884, 0.954818, -0.194967, 0.543635, 0.15877, 0.646432, -0.486729, 1.110693,
        0.67333, 0.931842, 0.1769, 0.973522, -0.081493, 1.479604, -0.196144, 0.643935, 0.0181,
        1.410894, 0.520141, 0.988102, -0.184301, 0.846785, 0.230913, 0.726004,
    ];

    let mut rng = swbnet::seeds::rng_from_seed(1);
    let r = mediate(&x, &z, &y, 1_000, &mut rng).unwrap();
    assert!((r.total_effect - 0.8522929333333336).abs() < 1e-8);
    assert!((r.direct_effect - 0.3851397435400499).abs() < 1e-8);
    assert!((r.indirect_effect - 0.46715318979328385).abs() < 1e-8);
    assert!((r.proportion_mediated - 0.5481134144410174).abs() < 1e-8);
}
