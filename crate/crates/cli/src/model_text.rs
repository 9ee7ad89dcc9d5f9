//! Plain-text model serialization with bit-exact float round-trips.
//!
//! Grammar (line oriented, single spaces, LF endings):
//!
//! ```text
//! mlp v1
//! hidden_activation <relu|identity|tanh>
//! output_activation <relu|identity|tanh>
//! layers <L>
//! layer <out_dim> <in_dim>        # repeated L times
//! <in_dim floats>                 #   one line per output row, out_dim lines
//! bias <out_dim floats>
//! head <in_dim>
//! weights <in_dim floats>
//! bias <float>
//! ```
//!
//! Floats use the 17-significant-digit format from [`crate::num_fmt`].

use std::path::Path;

use layerwise_core::{ActivationKind, LayerParams, Mlp, OutputHead};

use crate::error::{CliError, Result};
use crate::num_fmt::{fmt_f64, parse_f64};

pub fn render_model(net: &Mlp) -> String {
    let mut out = String::from("mlp v1\n");
    out.push_str(&format!(
        "hidden_activation {}\n",
        net.hidden_activation().name()
    ));
    out.push_str(&format!(
        "output_activation {}\n",
        net.head().activation().name()
    ));
    out.push_str(&format!("layers {}\n", net.depth()));
    for layer in net.layers() {
        out.push_str(&format!("layer {} {}\n", layer.out_dim(), layer.in_dim()));
        for row in 0..layer.out_dim() {
            let cells: Vec<String> = layer.weights()
                [row * layer.in_dim()..(row + 1) * layer.in_dim()]
                .iter()
                .map(|w| fmt_f64(*w))
                .collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        let bias: Vec<String> = layer.bias().iter().map(|b| fmt_f64(*b)).collect();
        out.push_str(&format!("bias {}\n", bias.join(" ")));
    }
    out.push_str(&format!("head {}\n", net.head().in_dim()));
    let weights: Vec<String> = net.head().weights().iter().map(|w| fmt_f64(*w)).collect();
    out.push_str(&format!("weights {}\n", weights.join(" ")));
    out.push_str(&format!("bias {}\n", fmt_f64(net.head().bias())));
    out
}

struct Cursor<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    path: &'a Path,
    last_line: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        match self.lines.next() {
            Some((idx, line)) => {
                self.last_line = idx + 1;
                Ok((idx + 1, line))
            }
            None => Err(CliError::parse(
                self.path,
                self.last_line + 1,
                "unexpected end of file",
            )),
        }
    }

    /// Next line, which must start with `tag`; returns the remaining tokens.
    fn tagged(&mut self, tag: &str) -> Result<(usize, Vec<&'a str>)> {
        let (line_no, line) = self.next()?;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some(first) if first == tag => Ok((line_no, tokens.collect())),
            _ => Err(CliError::parse(
                self.path,
                line_no,
                format!("expected `{tag} ...`, got `{line}`"),
            )),
        }
    }

    fn floats(&mut self, expected: usize) -> Result<Vec<f64>> {
        let (line_no, line) = self.next()?;
        self.parse_floats(line.split_whitespace().collect(), expected, line_no)
    }

    fn parse_floats(&self, tokens: Vec<&str>, expected: usize, line_no: usize) -> Result<Vec<f64>> {
        if tokens.len() != expected {
            return Err(CliError::parse(
                self.path,
                line_no,
                format!("expected {expected} floats, got {}", tokens.len()),
            ));
        }
        tokens
            .iter()
            .map(|t| {
                parse_f64(t).ok_or_else(|| {
                    CliError::parse(self.path, line_no, format!("invalid float `{t}`"))
                })
            })
            .collect()
    }
}

fn parse_count(token: Option<&&str>, what: &str, path: &Path, line_no: usize) -> Result<usize> {
    token
        .and_then(|t| t.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::parse(path, line_no, format!("expected a positive {what}")))
}

/// Parses model text; `path` is used only to label errors.
pub fn parse_model(text: &str, path: &Path) -> Result<Mlp> {
    let mut cursor = Cursor {
        lines: text.lines().enumerate(),
        path,
        last_line: 0,
    };
    let (line_no, header) = cursor.next()?;
    if header.trim() != "mlp v1" {
        return Err(CliError::parse(
            path,
            line_no,
            format!("expected `mlp v1`, got `{header}`"),
        ));
    }

    let activation = |tokens: &[&str], line_no: usize| -> Result<ActivationKind> {
        tokens
            .first()
            .and_then(|name| ActivationKind::from_name(name))
            .ok_or_else(|| CliError::parse(path, line_no, "expected an activation name"))
    };
    let (line_no, tokens) = cursor.tagged("hidden_activation")?;
    let hidden_activation = activation(&tokens, line_no)?;
    let (line_no, tokens) = cursor.tagged("output_activation")?;
    let output_activation = activation(&tokens, line_no)?;

    let (line_no, tokens) = cursor.tagged("layers")?;
    let depth = parse_count(tokens.first(), "layer count", path, line_no)?;

    let mut layers = Vec::with_capacity(depth);
    for _ in 0..depth {
        let (line_no, tokens) = cursor.tagged("layer")?;
        let out_dim = parse_count(tokens.first(), "output dimension", path, line_no)?;
        let in_dim = parse_count(tokens.get(1), "input dimension", path, line_no)?;
        let mut weights = Vec::with_capacity(out_dim * in_dim);
        for _ in 0..out_dim {
            weights.extend(cursor.floats(in_dim)?);
        }
        let (line_no, tokens) = cursor.tagged("bias")?;
        let bias = cursor.parse_floats(tokens, out_dim, line_no)?;
        layers.push(LayerParams::new(out_dim, in_dim, weights, bias)?);
    }

    let (line_no, tokens) = cursor.tagged("head")?;
    let head_dim = parse_count(tokens.first(), "input dimension", path, line_no)?;
    let (line_no, tokens) = cursor.tagged("weights")?;
    let weights = cursor.parse_floats(tokens, head_dim, line_no)?;
    let (line_no, tokens) = cursor.tagged("bias")?;
    let bias = cursor.parse_floats(tokens, 1, line_no)?[0];
    let head = OutputHead::new(weights, bias, output_activation)?;

    if let Ok((line_no, extra)) = cursor.next() {
        if !extra.trim().is_empty() {
            return Err(CliError::parse(
                path,
                line_no,
                format!("unexpected trailing content `{extra}`"),
            ));
        }
    }
    Ok(Mlp::new(layers, head, hidden_activation)?)
}

pub fn write_model(net: &Mlp, path: &Path) -> Result<()> {
    std::fs::write(path, render_model(net))
        .map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn read_model(path: &Path) -> Result<Mlp> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    parse_model(&text, path)
}
