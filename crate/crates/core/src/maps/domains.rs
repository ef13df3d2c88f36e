//! Generators and polygon counts for diagrams on the refined surface.

use rustc_hash::FxHashMap;

use super::fine::{find_polygons, CurveKind, FineSurface, Lift, Polygon, PolygonSpec, SideClass};
use crate::complex::{enumerate_with, Generator};
use crate::error::{Error, Result};

/// A choice of `n * m` vertical lifts on a refined surface. Slot `b = c * m + k`
/// holds a lift occupying column slot `c`.
#[derive(Clone, Debug)]
pub struct FineDiagram<'s> {
    surface: &'s FineSurface,
    verticals: Vec<Lift>,
    /// horizontal lift met by slot `b` at row `r`, as `r * m + label`
    incidence: Vec<usize>,
    /// lifted intersection point id to `(slot, row)`
    points: FxHashMap<u32, (usize, usize)>,
    generators: Vec<Generator>,
}

impl<'s> FineDiagram<'s> {
    pub fn new(surface: &'s FineSurface, verticals: Vec<Lift>) -> Result<Self> {
        let (n, m) = (surface.n(), surface.m());
        assert_eq!(verticals.len(), n * m);
        let mut incidence = vec![usize::MAX; n * m * n];
        let mut points = FxHashMap::default();
        for (b, &(cv, label)) in verticals.iter().enumerate() {
            let curve = &surface.curves()[cv];
            for (i, &p) in curve.pts.iter().enumerate() {
                for &(ca, ia) in surface.through(p) {
                    let CurveKind::Alpha(r) = surface.curves()[ca].kind else {
                        continue;
                    };
                    let sheet = surface.sheet_on(cv, label, i as i64);
                    let la = surface.label_at(ca, ia as i64, sheet);
                    if incidence[b * n + r] != usize::MAX {
                        return Err(Error::CheckFailed(format!(
                            "vertical slot {b} meets row {r} twice"
                        )));
                    }
                    incidence[b * n + r] = r * m + la;
                    points.insert(surface.vertex_id(p, sheet), (b, r));
                }
            }
        }
        if incidence.iter().any(|&a| a == usize::MAX) {
            return Err(Error::CheckFailed("a vertical curve misses a row".into()));
        }
        let generators = enumerate_with(n, m, |b, r| incidence[b * n + r])?;
        Ok(FineDiagram {
            surface,
            verticals,
            incidence,
            points,
            generators,
        })
    }

    pub fn surface(&self) -> &'s FineSurface {
        self.surface
    }

    pub fn verticals(&self) -> &[Lift] {
        &self.verticals
    }

    pub fn slot_of(&self, lift: Lift) -> Option<usize> {
        self.verticals.iter().position(|&l| l == lift)
    }

    pub fn incidence(&self, b: usize, r: usize) -> usize {
        self.incidence[b * self.surface.n() + r]
    }

    pub fn point(&self, id: u32) -> Option<(usize, usize)> {
        self.points.get(&id).copied()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn index_of(&self, x: Generator) -> Option<usize> {
        self.generators.binary_search(&x).ok()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// All horizontal lifts.
    pub fn alpha_lifts(&self) -> SideClass {
        let s = self.surface;
        SideClass::of(
            s.curves()
                .iter()
                .enumerate()
                .filter(|(_, c)| matches!(c.kind, CurveKind::Alpha(_)))
                .flat_map(|(id, _)| (0..s.m()).map(move |k| (id, k))),
        )
    }

    pub fn vertical_lifts(&self) -> SideClass {
        SideClass::of(self.verticals.iter().copied())
    }

    /// Empty rectangles of this diagram.
    pub fn rectangles(&self) -> Result<PolygonTerms> {
        let spec = PolygonSpec {
            sides: vec![
                self.alpha_lifts(),
                self.vertical_lifts(),
                self.alpha_lifts(),
                self.vertical_lifts(),
            ],
            first_headings: vec![(1, 0)],
        };
        let polys = find_polygons(self.surface, &spec);
        PolygonTerms::build(self, self, polys, &[0, 2], &[1, 3])
    }
}

/// The nonzero coefficients of a polygon-counting map, one term per polygon.
#[derive(Clone, Debug)]
pub struct PolygonTerms {
    pub polygons: Vec<Polygon>,
    /// `(source, target, polygon)`, sorted
    pub terms: Vec<(u32, u32, u32)>,
}

impl PolygonTerms {
    /// Matches polygons against source generators. `x_corners` are corner
    /// positions occupied by the source, `y_corners` by the target.
    pub fn build(
        src: &FineDiagram,
        tgt: &FineDiagram,
        polygons: Vec<Polygon>,
        x_corners: &[usize],
        y_corners: &[usize],
    ) -> Result<Self> {
        let s = src.surface();
        let size = s.n() * s.m();
        struct Shape {
            x: Vec<(usize, usize)>,
            y: Vec<(usize, usize)>,
            inside: Vec<(usize, usize)>,
        }
        let mut shapes = Vec::with_capacity(polygons.len());
        let mut bucket: FxHashMap<(usize, usize), Vec<u32>> = FxHashMap::default();
        for (pi, p) in polygons.iter().enumerate() {
            let corner = |d: &FineDiagram, i: usize| {
                let c = p.corners[i];
                d.point(s.vertex_id(c.pos, c.sheet)).ok_or_else(|| {
                    Error::CheckFailed(format!("corner {i} is not an intersection point"))
                })
            };
            let x = x_corners
                .iter()
                .map(|&i| corner(src, i))
                .collect::<Result<Vec<_>>>()?;
            let y = y_corners
                .iter()
                .map(|&i| corner(tgt, i))
                .collect::<Result<Vec<_>>>()?;
            let mut xs: Vec<usize> = x.iter().map(|p| p.0).collect();
            let mut ys: Vec<usize> = y.iter().map(|p| p.0).collect();
            xs.sort_unstable();
            ys.sort_unstable();
            if xs != ys {
                return Err(Error::CheckFailed(
                    "polygon corners do not pair up slots".into(),
                ));
            }
            let inside = p.interior.iter().filter_map(|&v| src.point(v)).collect();
            bucket.entry(x[0]).or_default().push(pi as u32);
            shapes.push(Shape { x, y, inside });
        }
        let mut terms = Vec::new();
        for (xi, &x) in src.generators().iter().enumerate() {
            for b in 0..size {
                let Some(list) = bucket.get(&(b, x.row(b))) else {
                    continue;
                };
                for &pi in list {
                    let sh = &shapes[pi as usize];
                    if sh.x.iter().any(|&(b, r)| x.row(b) != r)
                        || sh.inside.iter().any(|&(b, r)| x.row(b) == r)
                    {
                        continue;
                    }
                    let mut y = x;
                    for &(b, r) in &sh.y {
                        y = y.with_row(b, r);
                    }
                    let yi = tgt.index_of(y).ok_or_else(|| {
                        Error::CheckFailed("polygon target is not a generator".into())
                    })?;
                    terms.push((xi as u32, yi as u32, pi));
                }
            }
        }
        terms.sort_unstable();
        Ok(PolygonTerms { polygons, terms })
    }

    /// Coefficients mod 2 as sorted `(source, target)` pairs.
    pub fn mod2(&self) -> Vec<(u32, u32)> {
        let mut v: Vec<(u32, u32)> = Vec::new();
        for &(a, b, _) in &self.terms {
            if v.last() == Some(&(a, b)) {
                v.pop();
            } else {
                v.push((a, b));
            }
        }
        v
    }
}
