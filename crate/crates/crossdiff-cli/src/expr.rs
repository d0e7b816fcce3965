//! Initial-data expressions over a fixed catalogue.
//!
//! An expression is a sum of terms, each a sine or cosine mode, a
//! Gaussian bump, or a constant, optionally scaled by a numeric prefix:
//! `sin(1) + 0.5*cos(2)`, `gauss(1.5, 0.3)`, `const(2)`, `-0.25*sin(2,1)`.
//! Mode arguments count half-waves per axis against the domain lengths,
//! so `sin(k)` is sin(kπx/L) and the two-argument forms take one mode
//! number per axis.

/// One additive term of an initial-data expression.
#[derive(Clone, Debug, PartialEq)]
enum Term {
    Constant(f64),
    Sin {
        coef: f64,
        modes: Vec<u32>,
    },
    Cos {
        coef: f64,
        modes: Vec<u32>,
    },
    Gauss {
        coef: f64,
        center: Vec<f64>,
        width: f64,
    },
}

/// A parsed expression, evaluable at grid nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    terms: Vec<Term>,
    space_dim: usize,
}

fn split_top_level(text: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut current = String::new();
    let mut depth = 0usize;
    let mut prev: Option<char> = None;
    for ch in text.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            '+' | '-' if depth == 0 => {
                if matches!(prev, Some('e') | Some('E')) {
                    current.push(ch);
                } else if matches!(prev, None | Some('*') | Some('+') | Some('-')) {
                    if ch == '-' {
                        current.push(ch);
                    }
                } else {
                    parts.push(core::mem::take(&mut current));
                    if ch == '-' {
                        current.push(ch);
                    }
                }
            }
            _ => current.push(ch),
        }
        if !ch.is_whitespace() {
            prev = Some(ch);
        }
    }
    if !current.trim().is_empty() {
        parts.push(current);
    }
    parts
}

fn parse_number(text: &str) -> Result<f64, String> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| format!("`{}` is not a number", text.trim()))
}

fn parse_mode_list(args: &str, space_dim: usize) -> Result<Vec<u32>, String> {
    let modes: Result<Vec<u32>, String> = args
        .split(',')
        .map(|a| {
            let t = a.trim();
            t.parse::<u32>()
                .map_err(|_| format!("mode number `{t}` must be a nonnegative integer"))
        })
        .collect();
    let modes = modes?;
    if modes.len() != space_dim {
        return Err(format!(
            "expected {space_dim} mode number(s), found {}",
            modes.len()
        ));
    }
    Ok(modes)
}

fn parse_term(text: &str, space_dim: usize) -> Result<Term, String> {
    let mut body = text.trim();
    let mut coef = 1.0;
    if body.starts_with('-') {
        coef = -1.0;
        body = body[1..].trim_start();
    }
    if let Some(star) = find_top_level_star(body) {
        let (head, tail) = body.split_at(star);
        coef *= parse_number(head)?;
        body = tail[1..].trim_start();
    }
    if let Some(args) = function_args(body, "sin") {
        return Ok(Term::Sin {
            coef,
            modes: parse_mode_list(args, space_dim)?,
        });
    }
    if let Some(args) = function_args(body, "cos") {
        return Ok(Term::Cos {
            coef,
            modes: parse_mode_list(args, space_dim)?,
        });
    }
    if let Some(args) = function_args(body, "gauss") {
        let values: Result<Vec<f64>, String> = args.split(',').map(parse_number).collect();
        let values = values?;
        if values.len() != space_dim + 1 {
            return Err(format!(
                "gauss needs {} argument(s): center per axis then width",
                space_dim + 1
            ));
        }
        let width = values[space_dim];
        if !width.is_finite() || width <= 0.0 {
            return Err(String::from("gauss width must be positive"));
        }
        return Ok(Term::Gauss {
            coef,
            center: values[..space_dim].to_vec(),
            width,
        });
    }
    if let Some(args) = function_args(body, "const") {
        return Ok(Term::Constant(coef * parse_number(args)?));
    }
    Ok(Term::Constant(coef * parse_number(body)?))
}

fn find_top_level_star(text: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '*' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

fn function_args<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    let trimmed = text.trim();
    let rest = trimmed.strip_prefix(name)?;
    let rest = rest.trim_start();
    let inner = rest.strip_prefix('(')?;
    let inner = inner.trim_end();
    let inner = inner.strip_suffix(')')?;
    Some(inner)
}

/// Parses `text` into an expression for a domain of the given dimension.
pub fn parse_expression(text: &str, space_dim: usize) -> Result<Expression, String> {
    if !(1..=2).contains(&space_dim) {
        return Err(String::from("expressions support one or two dimensions"));
    }
    let parts = split_top_level(text);
    if parts.is_empty() {
        return Err(String::from("empty expression"));
    }
    let terms: Result<Vec<Term>, String> = parts
        .iter()
        .map(|p| parse_term(p, space_dim).map_err(|e| format!("in `{}`: {e}", p.trim())))
        .collect();
    Ok(Expression {
        terms: terms?,
        space_dim,
    })
}

impl Expression {
    /// Evaluates the expression at a point, with mode numbers scaled to the
    /// domain lengths.
    pub fn eval(&self, point: (f64, f64), lengths: &[f64]) -> f64 {
        let coords = [point.0, point.1];
        let mut total = 0.0;
        for term in &self.terms {
            total += match term {
                Term::Constant(c) => *c,
                Term::Sin { coef, modes } => {
                    let mut value = *coef;
                    for axis in 0..self.space_dim {
                        value *= (modes[axis] as f64 * core::f64::consts::PI * coords[axis]
                            / lengths[axis])
                            .sin();
                    }
                    value
                }
                Term::Cos { coef, modes } => {
                    let mut value = *coef;
                    for axis in 0..self.space_dim {
                        value *= (modes[axis] as f64 * core::f64::consts::PI * coords[axis]
                            / lengths[axis])
                            .cos();
                    }
                    value
                }
                Term::Gauss {
                    coef,
                    center,
                    width,
                } => {
                    let mut dist2 = 0.0;
                    for axis in 0..self.space_dim {
                        let delta = coords[axis] - center[axis];
                        dist2 += delta * delta;
                    }
                    coef * (-dist2 / (width * width)).exp()
                }
            };
        }
        total
    }
}
