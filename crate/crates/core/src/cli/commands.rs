//! The computations behind each subcommand, returning serializable reports.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::automorphism::{compute_aut, FiniteGroup};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::linear_system::{check_granularity, default_granularity, is_hyperelliptic, LinearSystemContext};
use crate::metric_graph::Model;
use crate::rational::{fmt_q, Q};
use crate::realization::{realize, MapMode, Realization};
use crate::trop_algebra::TropMatrix;

/// Lattice granularity requested on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Granularity {
    Refine(u32),
    Explicit(Q),
}

impl Granularity {
    fn resolve(&self, m: &Model, d: &Divisor, extra: &[Q]) -> Result<Q> {
        match self {
            Granularity::Refine(n) => Ok(default_granularity(m, d, extra, *n)),
            Granularity::Explicit(h) => {
                check_granularity(m, d, extra, h)?;
                Ok(h.clone())
            }
        }
    }
}

/// Which matrix realizations to print.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputMode {
    Projective,
    Affine,
    Euclidean,
    All,
}

impl OutputMode {
    fn includes(self, m: MapMode) -> bool {
        match self {
            OutputMode::All => true,
            OutputMode::Projective => m == MapMode::Projective,
            OutputMode::Affine => m == MapMode::Affine,
            OutputMode::Euclidean => m == MapMode::Euclidean,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InfoReport {
    pub vertices: usize,
    pub edges: usize,
    pub total_length: String,
    pub genus: i64,
    pub circle: bool,
    pub canonical_divisor: String,
    pub valences: Vec<(String, usize)>,
    /// Order of the automorphism group; absent for circles.
    pub automorphisms: Option<usize>,
}

impl InfoReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "vertices: {}", self.vertices);
        let _ = writeln!(s, "edges: {}", self.edges);
        let _ = writeln!(s, "total length: {}", self.total_length);
        let _ = writeln!(s, "genus: {}", self.genus);
        let _ = writeln!(s, "circle: {}", self.circle);
        let _ = writeln!(s, "canonical divisor: {}", self.canonical_divisor);
        let vals: Vec<String> = self.valences.iter().map(|(v, k)| format!("{v}={k}")).collect();
        let _ = writeln!(s, "valences: {}", vals.join(" "));
        match self.automorphisms {
            Some(n) => {
                let _ = writeln!(s, "automorphism group order: {n}");
            }
            None => {
                let _ = writeln!(s, "automorphism group: infinite (circle)");
            }
        }
        s
    }
}

pub fn cmd_info(m: &Arc<Model>) -> Result<InfoReport> {
    let automorphisms = match compute_aut(m) {
        Ok(g) => Some(g.order()),
        Err(Error::InfiniteGroup) => None,
        Err(e) => return Err(e),
    };
    Ok(InfoReport {
        vertices: m.num_vertices(),
        edges: m.num_edges(),
        total_length: fmt_q(&m.total_length()),
        genus: m.genus(),
        circle: m.is_circle(),
        canonical_divisor: m.canonical_divisor().display(m),
        valences: m.valences().into_iter().collect(),
        automorphisms,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorReport {
    /// Breakpoints per edge, as in the function text format.
    pub function: Vec<String>,
    /// `D + div(f)`.
    pub divisor: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalsReport {
    pub granularity: String,
    pub degree: i64,
    pub divisor: String,
    pub generators: Vec<GeneratorReport>,
    pub members_checked: usize,
    pub generation_failures: usize,
    pub rank: Option<i64>,
}

impl ExtremalsReport {
    pub fn passed(&self) -> bool {
        self.generation_failures == 0
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "divisor: {} (degree {})", self.divisor, self.degree);
        let _ = writeln!(s, "granularity: {}", self.granularity);
        let _ = writeln!(s, "generators: {}", self.generators.len());
        for (k, g) in self.generators.iter().enumerate() {
            let _ = writeln!(s, "  f{}:", k + 1);
            for line in &g.function {
                let _ = writeln!(s, "    {line}");
            }
            let _ = writeln!(s, "    D + div(f{}) = {}", k + 1, g.divisor);
        }
        if let Some(r) = self.rank {
            let _ = writeln!(s, "lattice rank: {r}");
        }
        let _ = writeln!(
            s,
            "generation check: {} ({} members of |D|, {} not generated)",
            if self.passed() { "pass" } else { "FAIL" },
            self.members_checked,
            self.generation_failures
        );
        if !self.passed() {
            let _ = writeln!(s, "warning: some lattice members are not generated; rerun with a larger --refine");
        }
        s
    }
}

fn function_lines(f: &crate::rational_fn::RationalFunction) -> Vec<String> {
    f.to_text().lines().map(str::to_string).collect()
}

pub fn cmd_extremals(m: &Arc<Model>, d: Divisor, gran: &Granularity, with_rank: bool) -> Result<ExtremalsReport> {
    d.check_on(m)?;
    let h = gran.resolve(m, &d, &[])?;
    let ctx = LinearSystemContext::new(m.clone(), d, &h)?;
    let set = ctx.enumerate_extremals()?;
    let rank = if with_rank { Some(ctx.rank()?) } else { None };
    Ok(ExtremalsReport {
        granularity: fmt_q(&h),
        degree: ctx.divisor().degree(),
        divisor: ctx.divisor().display(m),
        generators: set
            .functions
            .iter()
            .zip(&set.divisors)
            .map(|(f, e)| GeneratorReport { function: function_lines(f), divisor: e.display(m) })
            .collect(),
        members_checked: set.check.members,
        generation_failures: set.check.failures,
        rank,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementReport {
    pub element: String,
    /// One-line notation, 1-based: entry `k` is `π(k)`.
    pub permutation: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pgl: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub a_homomorphism: bool,
    pub p_homomorphism: bool,
    pub commutation: bool,
    pub commutation_failures: Vec<String>,
    pub phi_injective: bool,
    pub witness: Option<(String, String)>,
    pub psi_injective: bool,
    pub collisions: Vec<(String, String)>,
    pub generation_check: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RealizeReport {
    pub granularity: String,
    pub group_order: usize,
    pub invariant_divisor: String,
    pub n: usize,
    pub generators: Vec<GeneratorReport>,
    pub elements: Vec<ElementReport>,
    pub verification: VerificationReport,
}

impl RealizeReport {
    pub fn passed(&self) -> bool {
        let v = &self.verification;
        v.a_homomorphism && v.p_homomorphism && v.commutation && v.phi_injective && v.psi_injective && v.generation_check
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "granularity: {}", self.granularity);
        let _ = writeln!(s, "group order: {}", self.group_order);
        let _ = writeln!(s, "invariant divisor: {}", self.invariant_divisor);
        let _ = writeln!(s, "generators: {} (n = {})", self.generators.len(), self.n);
        for (k, g) in self.generators.iter().enumerate() {
            let _ = writeln!(s, "  f{}:", k + 1);
            for line in &g.function {
                let _ = writeln!(s, "    {line}");
            }
            let _ = writeln!(s, "    divisor: {}", g.divisor);
        }
        for e in &self.elements {
            let _ = writeln!(s, "element {}", e.element);
            let perm: Vec<String> = e.permutation.iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "  permutation: [{}]", perm.join(" "));
            if let Some(a) = &e.a {
                let _ = writeln!(s, "  A (det {}):", e.det.unwrap_or(0));
                for row in a {
                    let r: Vec<String> = row.iter().map(ToString::to_string).collect();
                    let _ = writeln!(s, "    [{}]", r.join(", "));
                }
            }
            for (label, m) in [("P", &e.p), ("PGL representative", &e.pgl)] {
                if let Some(m) = m {
                    let _ = writeln!(s, "  {label}:");
                    for row in m {
                        let _ = writeln!(s, "    [{}]", row.join(", "));
                    }
                }
            }
        }
        let v = &self.verification;
        let flag = |b: bool| if b { "pass" } else { "FAIL" };
        let _ = writeln!(s, "verification:");
        let _ = writeln!(s, "  A homomorphism: {}", flag(v.a_homomorphism));
        let _ = writeln!(s, "  P homomorphism: {}", flag(v.p_homomorphism));
        let _ = writeln!(s, "  commutation at lattice points: {}", flag(v.commutation));
        for f in &v.commutation_failures {
            let _ = writeln!(s, "    {f}");
        }
        let _ = writeln!(s, "  generation check: {}", flag(v.generation_check));
        match &v.witness {
            None => {
                let _ = writeln!(s, "  phi injective: pass");
            }
            Some((a, b)) => {
                let _ = writeln!(s, "  phi injective: FAIL ({a} and {b} have the same image)");
            }
        }
        let _ = writeln!(s, "  group homomorphism injective: {}", flag(v.psi_injective));
        for (a, b) in &v.collisions {
            let _ = writeln!(s, "    collision: {a} and {b} have the same matrices");
        }
        if !v.phi_injective || !v.generation_check {
            let _ = writeln!(s, "hint: a finer lattice (--refine) or another divisor may be needed");
        }
        s
    }
}

fn matrix_strings(m: &TropMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

/// Runs the realization pipeline for `d` and `g`.
pub fn cmd_realize(m: &Arc<Model>, d: Divisor, g: &FiniteGroup, gran: &Granularity, mode: OutputMode) -> Result<RealizeReport> {
    d.check_on(m)?;
    let extra = g.lattice_constraints();
    let h = gran.resolve(m, &d, &extra)?;
    let ctx = LinearSystemContext::new(m.clone(), d, &h)?;
    let r = realize(&ctx, g)?;
    Ok(realize_report(m, &r, mode))
}

/// Realization through the canonical divisor, refusing hyperelliptic graphs.
pub fn cmd_realize_canonical(m: &Arc<Model>, g: &FiniteGroup, gran: &Granularity, mode: OutputMode) -> Result<RealizeReport> {
    let genus = m.genus();
    if genus < 2 {
        return Err(Error::GenusTooSmall(genus));
    }
    let k = m.canonical_divisor();
    let h = gran.resolve(m, &k, &g.lattice_constraints())?;
    if is_hyperelliptic(m, &h)? {
        return Err(Error::Hyperelliptic);
    }
    cmd_realize(m, k, g, &Granularity::Explicit(h), mode)
}

pub fn realize_report(m: &Model, r: &Realization, mode: OutputMode) -> RealizeReport {
    let names: Vec<String> = r.group.elements().iter().map(|s| s.describe()).collect();
    let elements = r
        .elements
        .iter()
        .map(|e| ElementReport {
            element: names[e.element].clone(),
            permutation: e.permutation.iter().map(|k| k + 1).collect(),
            a: mode.includes(MapMode::Euclidean).then(|| e.a.clone()),
            det: mode.includes(MapMode::Euclidean).then_some(e.det),
            p: (mode.includes(MapMode::Affine) || mode.includes(MapMode::Projective)).then(|| matrix_strings(&e.p)),
            pgl: mode.includes(MapMode::Projective).then(|| matrix_strings(&e.pgl)),
        })
        .collect();
    let verification = VerificationReport {
        a_homomorphism: r.a_homomorphism,
        p_homomorphism: r.p_homomorphism,
        commutation: r.commutation_failures.is_empty(),
        commutation_failures: r
            .commutation_failures
            .iter()
            .map(|f| format!("{} at {} ({})", names[f.element], m.format_point(&f.point), f.which))
            .collect(),
        phi_injective: r.injectivity.injective,
        witness: r.injectivity.witness.as_ref().map(|(a, b)| (m.format_point(a), m.format_point(b))),
        psi_injective: r.psi_injective(),
        collisions: r.collisions.iter().map(|&(a, b)| (names[a].clone(), names[b].clone())).collect(),
        generation_check: r.generation.passed(),
    };
    RealizeReport {
        granularity: fmt_q(&r.h),
        group_order: r.group.order(),
        invariant_divisor: r.divisor.display(m),
        n: r.n(),
        generators: r
            .functions
            .iter()
            .zip(&r.divisors)
            .map(|(f, e)| GeneratorReport { function: function_lines(f), divisor: e.display(m) })
            .collect(),
        elements,
        verification,
    }
}
