//! The verification checks a scenario can run, each with the statement it
//! exercises.

pub struct CatalogEntry {
    pub kind: &'static str,
    pub function: &'static str,
    pub anchor: &'static str,
    pub summary: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        kind: "bmi",
        function: "check_bmi",
        anchor: "Theorem (main inequality)",
        summary: "mu(coordinate-wise p-combination) >= gamma-mean of the two measures",
    },
    CatalogEntry {
        kind: "bmi_mset",
        function: "check_bmi_mset",
        anchor: "Theorem (main inequality), several bodies",
        summary: "the same bound for m bodies and weights",
    },
    CatalogEntry {
        kind: "inclusion",
        function: "check_inclusion",
        anchor: "Proposition (reduction), Step 2",
        summary: "Firey p-combination lies inside the coordinate-wise one",
    },
    CatalogEntry {
        kind: "plus1_is_minkowski",
        function: "check_plus1_is_minkowski",
        anchor: "Remark (order one)",
        summary: "coordinate-wise order 1 matches the Minkowski combination",
    },
    CatalogEntry {
        kind: "firey_corollary",
        function: "check_firey_corollary",
        anchor: "Corollary (Firey combinations)",
        summary: "the main bound with the Firey p-combination on the left",
    },
    CatalogEntry {
        kind: "power_dilation_concavity",
        function: "check_power_dilation_concavity",
        anchor: "Corollary (power dilations)",
        summary: "t -> mu(t^{1/p} A) is gamma-concave",
    },
    CatalogEntry {
        kind: "dilation_concavity",
        function: "check_dilation_concavity",
        anchor: "Corollary (dilations)",
        summary: "t -> mu(t A) is concave with the improved exponent",
    },
    CatalogEntry {
        kind: "gaussian_improvement",
        function: "check_gaussian_improvement",
        anchor: "Corollary (Gaussian measure)",
        summary: "improved Gaussian exponent for unconditional bodies",
    },
    CatalogEntry {
        kind: "b_property",
        function: "check_b_property",
        anchor: "Corollary (B property)",
        summary: "t -> mu(e^t A) is log-concave",
    },
    CatalogEntry {
        kind: "functional_b",
        function: "check_functional_b",
        anchor: "Corollary (functional B property)",
        summary: "t -> int f(e^{-t} x) g(x) dx is log-concave",
    },
    CatalogEntry {
        kind: "uhrin",
        function: "uhrin_functional_check",
        anchor: "Theorem (functional form)",
        summary: "integral of the sup-convolution >= mean of the integrals",
    },
    CatalogEntry {
        kind: "lift_to_uniform",
        function: "lift_to_uniform",
        anchor: "Lemma (lifting)",
        summary: "uniform measures on lifted bodies converge to e^{-V}",
    },
];

pub fn render() -> String {
    let mut out = String::new();
    for e in CATALOG {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", e.kind, e.function, e.anchor, e.summary));
    }
    out.push_str("\nAlso accepted: certify_region (Hessian criterion on a region) and scan_log_bm (exploratory search, never fails a run).\n");
    out
}
