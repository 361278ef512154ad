//! Structural checks on a code bundle.

use serde::Serialize;

use qrank_core::f2linalg::{subspace_equal, MatF2};
use qrank_core::gf2field::{is_self_dual_basis, Fe};
use qrank_core::qconstruct::{
    build_proposed_code, certify_distance, symplectic_dual, BinarySymplecticCode, CertifyOptions, CodeBundle, ConstructionKind, MuContext,
    ProposedOptions,
};
use qrank_core::stacked_sim::{commutes, PauliString};

use crate::{to_json, CliError, Result};

#[derive(Serialize)]
struct Check {
    name: &'static str,
    ok: bool,
    detail: String,
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &'static str, ok: bool, detail: impl Into<String>) {
        self.0.push(Check { name, ok, detail: detail.into() });
    }
}

fn stabilizers_commute(code: &BinarySymplecticCode) -> bool {
    let paulis: Vec<PauliString> = code
        .generators()
        .row_vectors()
        .iter()
        .map(|r| PauliString::from_symplectic(r, code.layers(), code.cells()).expect("width matches"))
        .collect();
    paulis.iter().enumerate().all(|(i, p)| paulis[i + 1..].iter().all(|q| commutes(p, q).expect("same shape")))
}

fn proposed_checks(bundle: &CodeBundle, code: &BinarySymplecticCode, checks: &mut Checks) {
    let prov = &bundle.provenance;
    let field = prov.field;
    let alpha: Option<Vec<Fe>> = prov.alpha.iter().map(|h| field.parse_element(h).ok()).collect();
    let theta = prov.theta.as_ref().and_then(|h| field.parse_element(h).ok());
    let (Some(alpha), Some(theta), Some(t), Some(d)) = (alpha, theta, prov.t.clone(), prov.d.clone()) else {
        checks.push("provenance", false, "proposed bundle lacks alpha, theta, T or D");
        return;
    };
    checks.push("alpha self-dual", is_self_dual_basis(&alpha), "trace Gram matrix is the identity");
    match MuContext::with_congruence(field, Some(theta), d.clone()) {
        Ok(ctx) => {
            checks.push("T recomputed", ctx.t() == &t, "T from the normal basis matches the bundle");
            checks.push("D T D^T = S", true, "");
        }
        Err(e) => checks.push("D T D^T = S", false, e.to_string()),
    }
    let m = bundle.n;
    let k = code.dim() / field.degree().max(1) as usize;
    let opts = ProposedOptions { field: Some(field), alpha: Some(alpha), theta: Some(theta), congruence: Some(d) };
    match build_proposed_code(m, k, opts) {
        Ok(pc) => {
            let same = subspace_equal(pc.code.generators(), code.generators()).unwrap_or(false);
            checks.push("rebuild", same, "generators match a rebuild from the provenance");
            match pc.expanded_hermitian_dual() {
                Ok(h) => checks.push(
                    "symplectic dual = expanded Hermitian dual",
                    subspace_equal(&symplectic_dual(code), &h).unwrap_or(false),
                    "",
                ),
                Err(e) => checks.push("symplectic dual = expanded Hermitian dual", false, e.to_string()),
            }
        }
        Err(e) => checks.push("rebuild", false, e.to_string()),
    }
}

fn css_checks(code: &BinarySymplecticCode, checks: &mut Checks) {
    let half = code.n_qubits();
    let g: &MatF2 = code.generators();
    let pure = (0..g.rows()).all(|r| {
        let row = g.row(r);
        row.slice(0, half).is_zero() || row.slice(half, half).is_zero()
    });
    checks.push("CSS form", pure, "every generator is purely X or purely Z");
}

pub fn run(bundle: &CodeBundle, json: bool) -> Result<String> {
    let mut checks = Checks(Vec::new());
    let code = match bundle.code() {
        Ok(c) => {
            checks.push("self-orthogonal, independent generators", true, format!("dim C = {}", c.dim()));
            Some(c)
        }
        Err(e) => {
            checks.push("self-orthogonal, independent generators", false, e.to_string());
            None
        }
    };
    if let Some(code) = &code {
        let p = &bundle.params;
        checks.push("N = layers x cells", p.n == code.n_qubits(), format!("N = {}", p.n));
        checks.push("K = mn - dim C", p.k == code.logical_qubits(), format!("K = {}", p.k));
        checks.push("stabilizers commute", stabilizers_commute(code), "");
        let dual = symplectic_dual(code);
        checks.push("dim dual = 2mn - dim C", dual.rows() == 2 * code.n_qubits() - code.dim(), format!("dim = {}", dual.rows()));
        match bundle.provenance.construction {
            ConstructionKind::Proposed => proposed_checks(bundle, code, &mut checks),
            ConstructionKind::Css => css_checks(code, &mut checks),
        }
        if let (true, Some(d)) = (p.certified, p.d_r) {
            match certify_distance(code, CertifyOptions::default()) {
                Ok(cert) => checks.push("certified distance", cert.d == d, format!("recomputed D_R = {}", cert.d)),
                Err(e) => checks.push("certified distance", false, e.to_string()),
            }
        }
    }
    let failed: Vec<&str> = checks.0.iter().filter(|c| !c.ok).map(|c| c.name).collect();
    let report = if json {
        to_json(&serde_json::json!({ "checks": checks.0, "ok": failed.is_empty() }))
    } else {
        checks
            .0
            .iter()
            .map(|c| format!("{} {}{}\n", if c.ok { "PASS" } else { "FAIL" }, c.name, if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) }))
            .collect()
    };
    if failed.is_empty() {
        Ok(report)
    } else {
        print!("{report}");
        Err(CliError::Verification(failed.join(", ")))
    }
}
