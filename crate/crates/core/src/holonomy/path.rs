//! Piecewise-linear closed paths in control space.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::connection::{ControlParam, ControlPoint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathKind {
    C1Rectangle,
    Abchefa,
    Abchgfa,
    Adchefa,
    /// ADCHEFA traced on the cube labelling shared with ABCHEFA and ABCHGFA.
    AdchefaShared,
    FourParamBox,
    Custom,
}

impl PathKind {
    pub fn name(self) -> &'static str {
        match self {
            PathKind::C1Rectangle => "C1",
            PathKind::Abchefa => "ABCHEFA",
            PathKind::Abchgfa => "ABCHGFA",
            PathKind::Adchefa => "ADCHEFA",
            PathKind::AdchefaShared => "ADCHEFA-shared",
            PathKind::FourParamBox => "box4",
            PathKind::Custom => "custom",
        }
    }
}

impl fmt::Display for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PathKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "C1" | "C1_RECTANGLE" | "RECTANGLE" => Ok(PathKind::C1Rectangle),
            "ABCHEFA" => Ok(PathKind::Abchefa),
            "ABCHGFA" => Ok(PathKind::Abchgfa),
            "ADCHEFA" => Ok(PathKind::Adchefa),
            "ADCHEFA-SHARED" => Ok(PathKind::AdchefaShared),
            "BOX4" | "FOUR_PARAM_BOX" => Ok(PathKind::FourParamBox),
            "CUSTOM" => Ok(PathKind::Custom),
            _ => Err(Error::InvalidPath(format!("unknown path kind '{s}'"))),
        }
    }
}

/// Corner values of a box in control space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxCorners {
    #[serde(default)]
    pub ex1: f64,
    #[serde(default)]
    pub ex2: f64,
    pub ey1: f64,
    pub ey2: f64,
    pub lam1: f64,
    pub lam2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl BoxCorners {
    /// Box with E_x′ ≡ 0.
    pub fn new(ey1: f64, ey2: f64, lam1: f64, lam2: f64, b1: f64, b2: f64) -> Self {
        BoxCorners {
            ex1: 0.0,
            ex2: 0.0,
            ey1,
            ey2,
            lam1,
            lam2,
            b1,
            b2,
        }
    }

    pub fn with_ex(mut self, ex1: f64, ex2: f64) -> Self {
        self.ex1 = ex1;
        self.ex2 = ex2;
        self
    }

    /// Cube vertex by letter, indexed (E_y′, λ, B), E_x′ = ex1.
    fn cube(&self, label: char) -> ControlPoint {
        let (ey, lam, b) = match label {
            'A' => (self.ey2, self.lam1, self.b1),
            'B' => (self.ey1, self.lam1, self.b1),
            'C' => (self.ey1, self.lam2, self.b1),
            'D' => (self.ey2, self.lam2, self.b1),
            'E' => (self.ey2, self.lam2, self.b2),
            'F' => (self.ey2, self.lam1, self.b2),
            'G' => (self.ey1, self.lam1, self.b2),
            'H' => (self.ey1, self.lam2, self.b2),
            _ => unreachable!("no cube vertex {label}"),
        };
        ControlPoint::new(self.ex1, ey, lam, b)
    }

    fn trace(&self, labels: &str) -> Vec<ControlPoint> {
        labels.chars().map(|c| self.cube(c)).collect()
    }
}

const BOX_ORDER: [ControlParam; 4] = [
    ControlParam::Lambda,
    ControlParam::Ex,
    ControlParam::B,
    ControlParam::Ey,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterPath {
    pub vertices: Vec<ControlPoint>,
    pub closed: bool,
    pub kind: PathKind,
}

impl ParameterPath {
    pub fn new(vertices: Vec<ControlPoint>, kind: PathKind) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidPath("path has no vertices".into()));
        }
        for v in &vertices {
            v.check_positive()
                .map_err(|e| Error::InvalidPath(format!("vertex {v:?}: {e}")))?;
        }
        let closed = vertices.first() == vertices.last();
        Ok(ParameterPath {
            vertices,
            closed,
            kind,
        })
    }

    pub fn closed(vertices: Vec<ControlPoint>, kind: PathKind) -> Result<Self> {
        let p = ParameterPath::new(vertices, kind)?;
        p.require_closed()?;
        Ok(p)
    }

    pub fn require_closed(&self) -> Result<()> {
        if !self.closed {
            return Err(Error::InvalidPath("path is not closed".into()));
        }
        Ok(())
    }

    /// Counterclockwise rectangle in the (E_x′, E_y′) plane.
    pub fn rectangle(ex: (f64, f64), ey: (f64, f64), lambda: f64, b: f64) -> Result<Self> {
        let p = |x, y| ControlPoint::new(x, y, lambda, b);
        ParameterPath::closed(
            vec![
                p(ex.0, ey.0),
                p(ex.1, ey.0),
                p(ex.1, ey.1),
                p(ex.0, ey.1),
                p(ex.0, ey.0),
            ],
            PathKind::C1Rectangle,
        )
    }

    /// Named loops on an (E_y′, λ, B) box.
    pub fn named(kind: PathKind, c: &BoxCorners) -> Result<Self> {
        let vertices = match kind {
            PathKind::Abchefa => c.trace("ABCHEFA"),
            PathKind::Abchgfa => c.trace("ABCHGFA"),
            PathKind::AdchefaShared => c.trace("ADCHEFA"),
            PathKind::Adchefa => {
                let p = |ey, lam, b| ControlPoint::new(c.ex1, ey, lam, b);
                vec![
                    p(c.ey1, c.lam1, c.b1),
                    p(c.ey2, c.lam1, c.b1),
                    p(c.ey2, c.lam2, c.b1),
                    p(c.ey2, c.lam2, c.b2),
                    p(c.ey2, c.lam1, c.b2),
                    p(c.ey1, c.lam1, c.b2),
                    p(c.ey1, c.lam1, c.b1),
                ]
            }
            PathKind::FourParamBox => return ParameterPath::four_param_box(c),
            PathKind::C1Rectangle => {
                return ParameterPath::rectangle((c.ex1, c.ex2), (c.ey1, c.ey2), c.lam1, c.b1)
            }
            PathKind::Custom => {
                return Err(Error::InvalidPath("custom paths need explicit vertices".into()))
            }
        };
        ParameterPath::closed(vertices, kind)
    }

    /// Loop moving λ, E_x′, B, E_y′ to their second values one at a time,
    /// then back in the same order. The λ and B legs then sit at four
    /// different field directions.
    pub fn four_param_box(c: &BoxCorners) -> Result<Self> {
        let mut p = ControlPoint::new(c.ex1, c.ey1, c.lam1, c.b1);
        let second = [c.ex2, c.ey2, c.lam2, c.b2];
        let first = [c.ex1, c.ey1, c.lam1, c.b1];
        let mut vertices = vec![p];
        for values in [second, first] {
            for param in BOX_ORDER {
                let next = p.with(param, values[param.index()]);
                if next != p {
                    vertices.push(next);
                    p = next;
                }
            }
        }
        ParameterPath::closed(vertices, PathKind::FourParamBox)
    }

    /// Same path with every vertex passed through `f` (e.g. a change of units).
    pub fn map_points(&self, f: impl Fn(ControlPoint) -> ControlPoint) -> Result<Self> {
        let mut p = ParameterPath::new(self.vertices.iter().map(|v| f(*v)).collect(), self.kind)?;
        p.closed = self.closed;
        Ok(p)
    }

    pub fn reversed(&self) -> Self {
        let mut r = self.clone();
        r.vertices.reverse();
        r
    }

    /// `self` followed by `other`; the end of one must be the start of the other.
    pub fn concat(&self, other: &ParameterPath) -> Result<Self> {
        if self.vertices.last() != other.vertices.first() {
            return Err(Error::InvalidPath("paths do not join".into()));
        }
        let mut v = self.vertices.clone();
        v.extend_from_slice(&other.vertices[1..]);
        ParameterPath::new(v, PathKind::Custom)
    }

    /// Segments with nonzero length.
    pub fn segments(&self) -> impl Iterator<Item = (ControlPoint, ControlPoint)> + '_ {
        self.vertices
            .windows(2)
            .map(|w| (w[0], w[1]))
            .filter(|(a, b)| a != b)
    }

    pub fn any_ex_nonzero(&self) -> bool {
        self.vertices.iter().any(|v| v.ex != 0.0)
    }

    /// True when every vertex shares the coordinates outside `plane`.
    pub fn lies_in_plane(&self, plane: (ControlParam, ControlParam)) -> bool {
        let v0 = self.vertices[0];
        self.vertices.iter().all(|v| {
            ControlParam::ALL
                .iter()
                .filter(|p| **p != plane.0 && **p != plane.1)
                .all(|p| v.get(*p) == v0.get(*p))
        })
    }

    /// Parse a vertex list: one `Ex Ey lambda B` line per vertex; `#` starts a comment.
    pub fn parse_vertices(text: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: std::result::Result<Vec<f64>, _> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(str::parse)
                .collect();
            match nums {
                Ok(v) if v.len() == 4 => vertices.push(ControlPoint::new(v[0], v[1], v[2], v[3])),
                _ => {
                    return Err(Error::InvalidPath(format!(
                        "line {}: expected four numbers 'Ex Ey lambda B'",
                        lineno + 1
                    )))
                }
            }
        }
        ParameterPath::new(vertices, PathKind::Custom)
    }
}
