//! Figure-document assembly and JSON serialization.
//!
//! The wire format is the `{"data": [...], "layout": {...}}` dictionary
//! understood by plotly-style renderers, restricted to `mesh3d` and
//! `scatter3d` (lines) traces.

use serde::{Deserialize, Serialize};

use crate::drape::Path3D;
use crate::error::{Error, Result};
use crate::mesh::TriMesh;

pub const TERRAIN_COLOR: &str = "#8a7f6d";
pub const ROAD_COLOR: &str = "#ffffff";
pub const POWER_COLOR: &str = "#ff0000";
pub const BUILDING_COLOR: &str = "#add8e6";
/// Dark backdrop so white roads stay visible.
pub const BACKGROUND_COLOR: &str = "#1e1e24";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshTrace {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub k: Vec<usize>,
    pub color: String,
    pub flatshading: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineStyle {
    pub color: String,
    pub width: f64,
}

/// Polyline trace; `None` entries (JSON `null`) break the line and are
/// aligned across `x`, `y` and `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineTrace {
    pub name: String,
    pub mode: String,
    pub x: Vec<Option<f64>>,
    pub y: Vec<Option<f64>>,
    pub z: Vec<Option<f64>>,
    pub line: LineStyle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Trace {
    #[serde(rename = "mesh3d")]
    Mesh(MeshTrace),
    #[serde(rename = "scatter3d")]
    Line(LineTrace),
}

impl Trace {
    pub fn name(&self) -> &str {
        match self {
            Trace::Mesh(m) => &m.name,
            Trace::Line(l) => &l.name,
        }
    }

    pub fn color(&self) -> &str {
        match self {
            Trace::Mesh(m) => &m.color,
            Trace::Line(l) => &l.line.color,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Title {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub visible: bool,
    pub showgrid: bool,
}

impl Axis {
    fn hidden() -> Self {
        Axis { visible: false, showgrid: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneLayout {
    /// `"data"` keeps true proportions between x, y and z.
    pub aspectmode: String,
    pub bgcolor: String,
    pub xaxis: Axis,
    pub yaxis: Axis,
    pub zaxis: Axis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub title: Title,
    pub showlegend: bool,
    pub paper_bgcolor: String,
    pub scene: SceneLayout,
}

impl Layout {
    pub fn new(title: impl Into<String>) -> Self {
        Layout {
            title: Title { text: title.into() },
            showlegend: true,
            paper_bgcolor: BACKGROUND_COLOR.into(),
            scene: SceneLayout {
                aspectmode: "data".into(),
                bgcolor: BACKGROUND_COLOR.into(),
                xaxis: Axis::hidden(),
                yaxis: Axis::hidden(),
                zaxis: Axis::hidden(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureDoc {
    pub data: Vec<Trace>,
    pub layout: Layout,
}

/// Colors, widths and title for [`assemble_figure`].
#[derive(Debug, Clone, PartialEq)]
pub struct SceneStyle {
    pub title: String,
    pub terrain_color: String,
    pub road_color: String,
    pub power_color: String,
    pub building_color: String,
    pub road_width: f64,
    pub power_width: f64,
}

impl Default for SceneStyle {
    fn default() -> Self {
        SceneStyle {
            title: String::new(),
            terrain_color: TERRAIN_COLOR.into(),
            road_color: ROAD_COLOR.into(),
            power_color: POWER_COLOR.into(),
            building_color: BUILDING_COLOR.into(),
            road_width: 2.0,
            power_width: 3.0,
        }
    }
}

fn mesh_trace(name: String, mesh: &TriMesh, color: &str, flatshading: bool) -> Trace {
    Trace::Mesh(MeshTrace {
        name,
        x: mesh.xs.clone(),
        y: mesh.ys.clone(),
        z: mesh.zs.clone(),
        i: mesh.tris.iter().map(|t| t[0]).collect(),
        j: mesh.tris.iter().map(|t| t[1]).collect(),
        k: mesh.tris.iter().map(|t| t[2]).collect(),
        color: color.into(),
        flatshading,
    })
}

/// Flattens a path into one null-separated line trace.
pub fn line_trace(name: impl Into<String>, path: &Path3D, color: &str, width: f64) -> Trace {
    let n = path.point_count() + path.segments.len().saturating_sub(1);
    let (mut x, mut y, mut z) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for (s, seg) in path.segments.iter().enumerate() {
        if s > 0 {
            x.push(None);
            y.push(None);
            z.push(None);
        }
        for p in seg {
            x.push(Some(p[0]));
            y.push(Some(p[1]));
            z.push(Some(p[2]));
        }
    }
    Trace::Line(LineTrace {
        name: name.into(),
        mode: "lines".into(),
        x,
        y,
        z,
        line: LineStyle { color: color.into(), width },
    })
}

/// Orders traces as terrain, roads, power lines, then one mesh per building.
/// Empty road or power paths produce no trace.
pub fn assemble_figure(
    terrain: &TriMesh,
    roads: &Path3D,
    power: &Path3D,
    buildings: &[TriMesh],
    style: &SceneStyle,
) -> Result<FigureDoc> {
    if terrain.is_empty() {
        return Err(Error::EmptyScene);
    }
    let mut data = Vec::with_capacity(3 + buildings.len());
    data.push(mesh_trace("terrain".into(), terrain, &style.terrain_color, false));
    if !roads.is_empty() {
        data.push(line_trace("roads", roads, &style.road_color, style.road_width));
    }
    if !power.is_empty() {
        data.push(line_trace("power lines", power, &style.power_color, style.power_width));
    }
    for (n, b) in buildings.iter().enumerate() {
        data.push(mesh_trace(format!("building {}", n + 1), b, &style.building_color, true));
    }
    Ok(FigureDoc { data, layout: Layout::new(style.title.clone()) })
}

impl FigureDoc {
    /// Structural checks: index bounds, array alignment, finiteness.
    pub fn validate(&self) -> Result<()> {
        for trace in &self.data {
            let name = trace.name();
            let bad = |what: &str| Error::InvalidParameter(format!("trace `{name}`: {what}"));
            match trace {
                Trace::Mesh(m) => {
                    if m.y.len() != m.x.len() || m.z.len() != m.x.len() {
                        return Err(bad("x, y, z differ in length"));
                    }
                    if m.j.len() != m.i.len() || m.k.len() != m.i.len() {
                        return Err(bad("i, j, k differ in length"));
                    }
                    if m.i.iter().chain(&m.j).chain(&m.k).any(|&v| v >= m.x.len()) {
                        return Err(bad("triangle index past vertex count"));
                    }
                    if m.x.iter().chain(&m.y).chain(&m.z).any(|v| !v.is_finite()) {
                        return Err(Error::NonFinite(name.into()));
                    }
                }
                Trace::Line(l) => {
                    if l.y.len() != l.x.len() || l.z.len() != l.x.len() {
                        return Err(bad("x, y, z differ in length"));
                    }
                    let aligned = (0..l.x.len())
                        .all(|i| l.x[i].is_none() == l.y[i].is_none() && l.x[i].is_none() == l.z[i].is_none());
                    if !aligned {
                        return Err(bad("null separators are not aligned"));
                    }
                    let finite = l.x.iter().chain(&l.y).chain(&l.z).flatten().all(|v| v.is_finite());
                    if !finite {
                        return Err(Error::NonFinite(name.into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Serializes to compact JSON with shortest round-trip number formatting.
pub fn serialize_figure(f: &FigureDoc) -> Result<String> {
    f.validate()?;
    serde_json::to_string(f).map_err(|e| Error::Parse(format!("figure serialization: {e}")))
}

pub fn parse_figure(json: &str) -> Result<FigureDoc> {
    let doc: FigureDoc =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("figure document: {e}")))?;
    doc.validate()?;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::Value;

    fn one_triangle() -> TriMesh {
        let mut m = TriMesh::default();
        m.push_vertex(0.0, 0.0, 0.0);
        m.push_vertex(1.0, 0.0, 0.0);
        m.push_vertex(0.0, 1.0, 0.0);
        m.tris.push([0, 1, 2]);
        m
    }

    #[test]
    fn trace_order_without_lines() {
        let t = one_triangle();
        let f = assemble_figure(&t, &Path3D::default(), &Path3D::default(), &[t.clone(), t.clone()], &SceneStyle::default())
            .unwrap();
        let names: Vec<&str> = f.data.iter().map(Trace::name).collect();
        assert_eq!(names, vec!["terrain", "building 1", "building 2"]);
    }

    #[test]
    fn null_separated_segments() {
        let roads = Path3D {
            segments: vec![
                vec![[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [2.0, 0.0, 1.0]],
                vec![[5.0, 5.0, 2.0], [6.0, 5.0, 2.0]],
            ],
        };
        let Trace::Line(l) = line_trace("roads", &roads, ROAD_COLOR, 2.0) else { panic!() };
        assert_eq!(l.x.len(), 6);
        assert_eq!(l.x[3], None);
        assert_eq!(l.z[3], None);
        assert_eq!(l.x.iter().filter(|v| v.is_none()).count(), 1);
    }

    #[test]
    fn default_colors() {
        let t = one_triangle();
        let seg = Path3D { segments: vec![vec![[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]] };
        let f = assemble_figure(&t, &seg, &seg, std::slice::from_ref(&t), &SceneStyle::default()).unwrap();
        let colors: Vec<&str> = f.data.iter().map(Trace::color).collect();
        assert_eq!(colors, vec!["#8a7f6d", "#ffffff", "#ff0000", "#add8e6"]);
    }

    #[test]
    fn empty_terrain_is_rejected() {
        let r = assemble_figure(&TriMesh::default(), &Path3D::default(), &Path3D::default(), &[], &SceneStyle::default());
        assert_eq!(r, Err(Error::EmptyScene));
    }

    #[test]
    fn minimal_document_shape() {
        let f = FigureDoc { data: vec![mesh_trace("m".into(), &one_triangle(), "#000000", false)], layout: Layout::new("") };
        let json = serialize_figure(&f).unwrap();
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["data"][0]["type"], "mesh3d");
        assert_eq!(v["data"][0]["i"], serde_json::json!([0]));
        assert_eq!(v["data"][0]["j"], serde_json::json!([1]));
        assert_eq!(v["data"][0]["k"], serde_json::json!([2]));
        assert!(v["layout"].is_object());
        assert!(json.starts_with(r#"{"data":[{"type":"mesh3d","name":"m","#));
    }

    #[test]
    fn line_json_has_nulls_and_mode() {
        let seg = Path3D { segments: vec![vec![[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]], vec![[2.0, 2.0, 2.0], [3.0, 3.0, 3.0]]] };
        let f = FigureDoc { data: vec![line_trace("roads", &seg, ROAD_COLOR, 2.0)], layout: Layout::new("t") };
        let v: Value = serde_json::from_str(&serialize_figure(&f).unwrap()).unwrap();
        assert_eq!(v["data"][0]["type"], "scatter3d");
        assert_eq!(v["data"][0]["mode"], "lines");
        assert_eq!(v["data"][0]["x"][2], Value::Null);
        assert_eq!(v["data"][0]["line"]["color"], "#ffffff");
    }

    #[test]
    fn non_finite_names_the_trace() {
        let mut m = one_triangle();
        m.zs[1] = f64::NAN;
        let f = FigureDoc { data: vec![mesh_trace("building 7".into(), &m, BUILDING_COLOR, true)], layout: Layout::new("") };
        assert_eq!(serialize_figure(&f), Err(Error::NonFinite("building 7".into())));
    }

    #[test]
    fn misaligned_nulls_rejected() {
        let f = FigureDoc {
            data: vec![Trace::Line(LineTrace {
                name: "roads".into(),
                mode: "lines".into(),
                x: vec![Some(0.0), None, Some(1.0)],
                y: vec![Some(0.0), Some(1.0), Some(1.0)],
                z: vec![Some(0.0), None, Some(1.0)],
                line: LineStyle { color: ROAD_COLOR.into(), width: 2.0 },
            })],
            layout: Layout::new(""),
        };
        assert!(serialize_figure(&f).is_err());
    }

    proptest! {
        #[test]
        fn serialize_parse_reserialize(
            xs in proptest::collection::vec(-2.0e7f64..2.0e7, 3..20),
            zs in proptest::collection::vec(-500.0f64..9000.0, 20),
            breaks in proptest::collection::vec(1usize..5, 1..4),
        ) {
            let mut m = TriMesh::default();
            for (n, &x) in xs.iter().enumerate() {
                m.push_vertex(x, x * 0.5 + n as f64, zs[n]);
            }
            for n in 0..xs.len() - 2 {
                m.tris.push([n, n + 1, n + 2]);
            }
            let mut segments = Vec::new();
            let mut cursor = 0;
            for b in breaks {
                let seg: Vec<[f64; 3]> = (0..=b).map(|q| {
                    let v = xs[(cursor + q) % xs.len()];
                    [v, v / 3.0, zs[(cursor + q) % zs.len()] + 0.1]
                }).collect();
                cursor += b;
                segments.push(seg);
            }
            let path = Path3D { segments };
            let f = assemble_figure(&m, &path, &path, &[m.clone()], &SceneStyle { title: "Å ø".into(), ..SceneStyle::default() }).unwrap();
            let json = serialize_figure(&f).unwrap();
            let back = parse_figure(&json).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(serialize_figure(&back).unwrap(), json);
        }
    }
}
