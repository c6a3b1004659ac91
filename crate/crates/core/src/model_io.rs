//! Line-oriented text model files.
//!
//! ```text
//! SVMODEL 1 svc            SVMODEL 1 svr            SVMODEL 1 ovo
//! kernel gauss:c=2         kernel linear            classes 1 2 3
//! bias -0.25               bias 1.5                 pair 0 1
//! nsv 2                    epsilon 0.5              SVMODEL 1 svc
//! dim 3                    nsv 1                    ...
//! 0.5 1:1 3:2              dim 1                    pair 0 2
//! -0.5 2:1                 1 1:1                    ...
//! ```
//!
//! Support vectors are written in sparse form after their coefficient.
//! Reals use the shortest text that parses back to the same `f64`, so
//! decision values survive a round trip exactly. Training diagnostics are
//! not stored.

use std::fs;
use std::path::Path;

use crate::classify::{self, SvcModel};
use crate::data::parse_sparse;
use crate::error::{Result, SvmError};
use crate::kernel::{FeatureVector, KernelSpec};
use crate::multiclass::{self, MulticlassModel, PairModel};
use crate::regress::{self, SvrModel};

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Svc(SvcModel),
    Svr(SvrModel),
    Ovo(MulticlassModel),
}

impl Model {
    pub fn task(&self) -> &'static str {
        match self {
            Model::Svc(_) => "svc",
            Model::Svr(_) => "svr",
            Model::Ovo(_) => "ovo",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::Svc(m) => m.dim,
            Model::Svr(m) => m.dim,
            Model::Ovo(m) => m.pairs.iter().map(|p| p.model.dim).max().unwrap_or(0),
        }
    }

    /// Class label (as a real) for classifiers, regression value otherwise.
    pub fn predict(&self, x: &FeatureVector) -> Result<f64> {
        match self {
            Model::Svc(m) => classify::predict(m, x).map(|l| l as f64),
            Model::Svr(m) => regress::predict_svr(m, x),
            Model::Ovo(m) => multiclass::predict_vote(m, x).map(|l| l as f64),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Model> {
        Model::from_text(&fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Model::Svc(m) => write_svc(&mut out, m),
            Model::Svr(m) => {
                out.push_str("SVMODEL 1 svr\n");
                out.push_str(&format!("kernel {}\n", m.kernel));
                out.push_str(&format!("bias {}\n", m.bias));
                out.push_str(&format!("epsilon {}\n", m.epsilon));
                write_svs(&mut out, &m.support_vectors, &m.coefficients, m.dim);
            }
            Model::Ovo(m) => {
                out.push_str("SVMODEL 1 ovo\nclasses");
                for c in &m.classes {
                    out.push_str(&format!(" {c}"));
                }
                out.push('\n');
                for p in &m.pairs {
                    out.push_str(&format!("pair {} {}\n", p.first, p.second));
                    write_svc(&mut out, &p.model);
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Model> {
        let lines: Vec<&str> = text.lines().collect();
        let mut r = Reader { lines: &lines, pos: 0 };
        let model = match r.header()? {
            "svc" => Model::Svc(read_svc_body(&mut r)?),
            "svr" => {
                let kernel = r.kernel()?;
                let bias = r.real("bias")?;
                let epsilon = r.real("epsilon")?;
                let (support_vectors, coefficients, dim) = read_svs(&mut r)?;
                Model::Svr(SvrModel {
                    kernel,
                    support_vectors,
                    coefficients,
                    bias,
                    epsilon,
                    dim,
                    info: None,
                })
            }
            "ovo" => {
                let classes = r
                    .field("classes")?
                    .split_whitespace()
                    .map(|t| t.parse::<i64>().map_err(|_| r.error(format!("bad class `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                let k = classes.len();
                let mut pairs = Vec::new();
                for _ in 0..k * k.saturating_sub(1) / 2 {
                    let ij = r.field("pair")?;
                    let idx: Vec<usize> = ij
                        .split_whitespace()
                        .map(|t| t.parse().map_err(|_| r.error(format!("bad pair `{ij}`"))))
                        .collect::<Result<_>>()?;
                    if idx.len() != 2 {
                        return Err(r.error(format!("bad pair `{ij}`")));
                    }
                    if r.header()? != "svc" {
                        return Err(r.error("pair block must be an svc model"));
                    }
                    pairs.push(PairModel {
                        first: idx[0],
                        second: idx[1],
                        model: read_svc_body(&mut r)?,
                    });
                }
                Model::Ovo(MulticlassModel::new(classes, pairs)?)
            }
            other => return Err(r.error(format!("unknown model task `{other}`"))),
        };
        if let Some(extra) = r.next_content() {
            return Err(SvmError::ModelFormat(format!(
                "line {}: trailing content `{extra}`",
                r.pos
            )));
        }
        Ok(model)
    }
}

impl From<SvcModel> for Model {
    fn from(m: SvcModel) -> Self {
        Model::Svc(m)
    }
}

impl From<SvrModel> for Model {
    fn from(m: SvrModel) -> Self {
        Model::Svr(m)
    }
}

impl From<MulticlassModel> for Model {
    fn from(m: MulticlassModel) -> Self {
        Model::Ovo(m)
    }
}

fn write_svc(out: &mut String, m: &SvcModel) {
    out.push_str("SVMODEL 1 svc\n");
    out.push_str(&format!("kernel {}\n", m.kernel));
    out.push_str(&format!("bias {}\n", m.bias));
    write_svs(out, &m.support_vectors, &m.coefficients, m.dim);
}

fn write_svs(out: &mut String, svs: &[FeatureVector], coefs: &[f64], dim: usize) {
    out.push_str(&format!("nsv {}\ndim {}\n", svs.len(), dim));
    for (sv, c) in svs.iter().zip(coefs) {
        out.push_str(&c.to_string());
        for (i, v) in sv.nonzeros() {
            out.push_str(&format!(" {i}:{v}"));
        }
        out.push('\n');
    }
}

struct Reader<'a> {
    lines: &'a [&'a str],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn error(&self, msg: impl std::fmt::Display) -> SvmError {
        SvmError::ModelFormat(format!("line {}: {msg}", self.pos))
    }

    fn next_content(&mut self) -> Option<&'a str> {
        while self.pos < self.lines.len() {
            let line = self.lines[self.pos].trim();
            self.pos += 1;
            if !line.is_empty() {
                return Some(line);
            }
        }
        None
    }

    fn line(&mut self) -> Result<&'a str> {
        self.next_content()
            .ok_or_else(|| SvmError::ModelFormat("unexpected end of model file".into()))
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.line()?;
        match line.split_once(char::is_whitespace) {
            Some((k, rest)) if k == key => Ok(rest.trim()),
            _ if line == key => Ok(""),
            _ => Err(self.error(format!("expected `{key}`, found `{line}`"))),
        }
    }

    fn real(&mut self, key: &str) -> Result<f64> {
        let v = self.field(key)?;
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.error(format!("bad {key} `{v}`")))
    }

    fn count(&mut self, key: &str) -> Result<usize> {
        let v = self.field(key)?;
        v.parse().map_err(|_| self.error(format!("bad {key} `{v}`")))
    }

    fn kernel(&mut self) -> Result<KernelSpec> {
        self.field("kernel")?.parse()
    }

    fn header(&mut self) -> Result<&'a str> {
        let line = self.line()?;
        let mut toks = line.split_whitespace();
        match (toks.next(), toks.next(), toks.next(), toks.next()) {
            (Some("SVMODEL"), Some("1"), Some(task), None) => Ok(task),
            (Some("SVMODEL"), Some(v), _, _) => Err(self.error(format!("unsupported version `{v}`"))),
            _ => Err(self.error("missing `SVMODEL` header")),
        }
    }
}

fn read_svs(r: &mut Reader<'_>) -> Result<(Vec<FeatureVector>, Vec<f64>, usize)> {
    let nsv = r.count("nsv")?;
    let dim = r.count("dim")?;
    let start = r.pos;
    let mut block = String::new();
    for _ in 0..nsv {
        block.push_str(r.line()?);
        block.push('\n');
    }
    let data = parse_sparse(&block).map_err(|e| match e {
        SvmError::Parse { line, msg } => SvmError::ModelFormat(format!("line {}: {msg}", start + line)),
        other => other,
    })?;
    if let Some(sv) = data.samples.iter().find(|s| s.dim() > dim) {
        return Err(SvmError::DimensionMismatch {
            expected: dim,
            found: sv.dim(),
        });
    }
    Ok((data.samples, data.targets, dim))
}

fn read_svc_body(r: &mut Reader<'_>) -> Result<SvcModel> {
    let kernel = r.kernel()?;
    let bias = r.real("bias")?;
    let (support_vectors, coefficients, dim) = read_svs(r)?;
    Ok(SvcModel {
        kernel,
        support_vectors,
        coefficients,
        bias,
        dim,
        info: None,
    })
}
