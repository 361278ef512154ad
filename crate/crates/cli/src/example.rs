//! The m = 2, k = 1 construction over GF(16), reproduced step by step and
//! checked against reference values at every step.

use serde::Serialize;

use qrank_core::f2linalg::{MatF2, RowSpace};
use qrank_core::gabidulin::is_hermitian_self_orthogonal;
use qrank_core::gf2field::{is_self_dual_basis, Fe, FieldSpec};
use qrank_core::qconstruct::{build_proposed_code, certify_distance, CertifyOptions, MuContext, ProposedOptions, QuantumCodeParams};
use qrank_core::stacked_sim::{commutes, mu_map, PauliString};

use crate::{matrix_lines, to_json, CliError, Result};

const MODULUS: u64 = 0b10011;
const ALPHA_EXPONENTS: [u64; 4] = [3, 7, 12, 13];
const THETA_EXPONENT: u64 = 3;
const REFERENCE_T: [&str; 4] = ["0100", "1001", "0001", "0110"];
const REFERENCE_D: [&str; 4] = ["1000", "0010", "0100", "1001"];
/// Published generators of the stabilizer group, one layer per two letters.
pub const REFERENCE_STABILIZERS: [&str; 4] = ["XI | YX | IX | IY", "ZX | XY | IY | YY", "YZ | XZ | YY | ZY", "ZI | XX | ZY | IZ"];

#[derive(Serialize)]
struct Transcript {
    modulus: String,
    self_dual_basis: Vec<String>,
    hermitian_self_orthogonal: bool,
    theta: String,
    normal_basis: Vec<String>,
    t: Vec<String>,
    d: Vec<String>,
    reference_d_valid: bool,
    generators: Vec<String>,
    stabilizers: Vec<String>,
    reference_stabilizers_in_group: bool,
    reference_stabilizers_span: bool,
    reference_stabilizers_commute: bool,
    params: QuantumCodeParams,
    dual_vectors_enumerated: u64,
}

fn power_label(x: Fe) -> String {
    let w = x.field().root();
    let e = (0..15).find(|&e| w.pow(e) == x).expect("nonzero element");
    format!("w^{e} ({})", x.to_hex())
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Verification(format!("example: {what}")))
    }
}

fn build(threads: Option<usize>) -> Result<Transcript> {
    let field = FieldSpec::new(4, MODULUS)?;
    let w = field.root();
    let alpha: Vec<Fe> = ALPHA_EXPONENTS.iter().map(|&e| w.pow(e)).collect();
    check(is_self_dual_basis(&alpha), "evaluation points are not a self-dual basis")?;
    let theta = w.pow(THETA_EXPONENT);

    let pc = build_proposed_code(2, 1, ProposedOptions { field: Some(field), alpha: Some(alpha.clone()), theta: Some(theta), congruence: None })?;
    let hso = is_hermitian_self_orthogonal(&pc.classical).map_err(|e| CliError::Verification(e.to_string()))?;
    check(hso, "Gab(alpha, 1) is not Hermitian self-orthogonal")?;

    let ctx = &pc.context;
    let reference_t = MatF2::parse_rows(&REFERENCE_T).expect("valid literal");
    check(ctx.t() == &reference_t, "T differs from the reference matrix")?;
    let reference_d = MatF2::parse_rows(&REFERENCE_D).expect("valid literal");
    let reference_d_valid = MuContext::with_congruence(field, Some(theta), reference_d).is_ok();
    check(reference_d_valid, "reference D does not satisfy D T D^T = S")?;

    let generators = pc.code.generators();
    check(generators.rows() == 4 && generators.cols() == 16, "Phi(C) is not a 4-dimensional subspace of GF(2)^16")?;
    let stabilizers: Vec<PauliString> =
        generators.row_vectors().iter().map(|r| PauliString::from_symplectic(r, 4, 2)).collect::<std::result::Result<_, _>>()?;

    let references: Vec<PauliString> = REFERENCE_STABILIZERS.iter().map(|s| PauliString::parse(s)).collect::<std::result::Result<_, _>>()?;
    let images: Vec<_> = references.iter().map(|p| qrank_core::qconstruct::m_unmap(mu_map(p).matrix())).collect::<std::result::Result<_, _>>()?;
    let space = RowSpace::new(generators);
    let in_group = images.iter().all(|v| space.contains(v));
    check(in_group, "a reference stabilizer lies outside the generated group")?;
    let span = MatF2::from_rows(16, &images).expect("equal lengths").rank() == 4;
    check(span, "reference stabilizers do not span the group")?;
    let mut commute = true;
    for (i, p) in references.iter().enumerate() {
        for q in &references[i + 1..] {
            commute &= commutes(p, q)?;
        }
    }
    check(commute, "reference stabilizers do not commute")?;

    let cert = certify_distance(&pc.code, CertifyOptions { threads, ..Default::default() })?;
    let params = pc.params.with_certificate(&cert);
    check(params.n == 8 && params.k == 4 && params.d_r == Some(2) && params.certified, "parameters differ from [[8, 4, 2]]")?;

    Ok(Transcript {
        modulus: format!("x^4 + x + 1 (0x{})", field.modulus_hex()),
        self_dual_basis: alpha.iter().map(|&a| power_label(a)).collect(),
        hermitian_self_orthogonal: hso,
        theta: power_label(theta),
        normal_basis: ctx.theta_basis().elements().iter().map(|&e| power_label(e)).collect(),
        t: matrix_lines(ctx.t()),
        d: matrix_lines(ctx.d()),
        reference_d_valid,
        generators: matrix_lines(generators),
        stabilizers: stabilizers.iter().map(|p| p.letters().join(" ")).collect(),
        reference_stabilizers_in_group: in_group,
        reference_stabilizers_span: span,
        reference_stabilizers_commute: commute,
        params,
        dual_vectors_enumerated: cert.enumerated,
    })
}

fn indent(lines: &[String]) -> String {
    lines.iter().map(|l| format!("    {l}\n")).collect()
}

pub fn run(threads: Option<usize>, json: bool) -> Result<String> {
    let t = build(threads)?;
    if json {
        return Ok(to_json(&t));
    }
    let mut out = String::new();
    out += &format!("1. field GF(16), modulus {}\n", t.modulus);
    out += &format!("2. self-dual basis alpha = {}\n", t.self_dual_basis.join(", "));
    out += &format!("3. Gab(alpha, 1) Hermitian self-orthogonal: {}\n", t.hermitian_self_orthogonal);
    out += &format!("4. normal basis from theta = {}: {}\n", t.theta, t.normal_basis.join(", "));
    out += &format!("5. T (matches reference):\n{}", indent(&t.t));
    out += &format!("6. D with D T D^T = S:\n{}   reference D satisfies D T D^T = S: {}\n", indent(&t.d), t.reference_d_valid);
    out += &format!("7. Phi(C) generator matrix:\n{}", indent(&t.generators));
    out += &format!("8. stabilizer generators (X^a Z^b per site, XZ shown as Y):\n{}", indent(&t.stabilizers));
    out += &format!(
        "   reference generators: in group {}, span the group {}, commute {}\n",
        t.reference_stabilizers_in_group, t.reference_stabilizers_span, t.reference_stabilizers_commute
    );
    out += &format!("9. distance certified over {} dual vectors\n", t.dual_vectors_enumerated);
    out += &format!("parameters: {}\n", t.params);
    Ok(out)
}
