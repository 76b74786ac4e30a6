use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use contcalc_core::container::{io::load_container, Container};
use contcalc_core::dsl::{parse_signature, SignatureAst};
use contcalc_core::fixpoint::Signature;
use contcalc_core::groupoid::io::load_groupoid;
use contcalc_core::Limits;

pub const BUILTINS: &[&str] = &["list", "list2", "tree", "twisted"];

fn builtin(name: &str) -> Option<Signature> {
    match name {
        "list" => Some(Signature::list(1)),
        "list2" => Some(Signature::list(2)),
        "tree" => Some(Signature::binary_tree()),
        "twisted" => Some(Signature::twisted()),
        _ => None,
    }
}

/// A parsed signature file; groupoid files are resolved next to it.
fn read_ast(path: &Path, limits: &Limits) -> Result<(SignatureAst, impl Fn(&str) -> contcalc_core::Result<contcalc_core::groupoid::FinGroupoid>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let ast = parse_signature(&text).with_context(|| format!("parsing {}", path.display()))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let limits = *limits;
    let load = move |file: &str| {
        let text = fs::read_to_string(dir.join(file))
            .map_err(|e| contcalc_core::Error::Unsupported(format!("reading {file}: {e}")))?;
        load_groupoid(&text, &limits)
    };
    Ok((ast, load))
}

/// A builtin signature name or a signature file.
pub fn signature(arg: &str, limits: &Limits) -> Result<Signature> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(sig) = builtin(arg) {
            return Ok(sig);
        }
        bail!("no signature file or builtin named `{arg}` (builtins: {})", BUILTINS.join(", "));
    }
    let (ast, load) = read_ast(path, limits)?;
    Ok(ast.to_signature(&load)?)
}

/// A container file: semantic JSON when it starts with `{`, the signature
/// language otherwise.
pub fn container(arg: &str, limits: &Limits) -> Result<(Container, Option<String>)> {
    let path = Path::new(arg);
    let text = fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
    if text.trim_start().starts_with('{') {
        return Ok((load_container(&text, limits).with_context(|| format!("loading {arg}"))?, None));
    }
    let (ast, load) = read_ast(path, limits)?;
    let star = ast.star().map(str::to_string);
    Ok((ast.to_container(&load)?, star))
}
