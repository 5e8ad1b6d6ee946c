mod common;

use std::collections::BTreeSet;

use cgf_core::approx_group::{build_pi_delta, EqualityRegions};
use cgf_core::ccgf::construct_delta_n;
use cgf_core::ccgf::separation_certificate;
use cgf_core::minimality::min_slack_in_window;
use cgf_core::pwl::sup_distance;
use cgf_core::{rat, Rational};
use common::*;

#[test]
fn gamma_hat_for_pi_delta() {
    let (b, delta) = (rat(2, 5), rat(1, 10));
    let f = build_pi_delta(&b, &delta).unwrap();
    let regions = EqualityRegions::new(delta.clone(), b.clone());
    let v = min_slack_in_window(&f, &regions.boundary_points(), &regions.complement_window()).unwrap();
    // dense-grid value on (1/80)ℤ²
    assert_eq!(grid_gamma(&points_of(&f), &b, &delta, 80), rat(1, 2));
    assert_eq!(v.slack, rat(1, 2));
}

#[test]
fn pi_delta_against_gmi() {
    let f = build_pi_delta(&rat(2, 5), &rat(1, 10)).unwrap();
    let g = gmi(rat(2, 5));
    let (pf, pg) = (points_of(&f), points_of(&g));
    let xs: BTreeSet<Rational> = pf.iter().chain(&pg).map(|p| p.0.clone()).collect();
    let oracle = xs
        .iter()
        .map(|x| (eval_points(&pf, x) - eval_points(&pg, x)).abs())
        .max()
        .unwrap();
    assert_eq!(oracle, rat(1, 3));
    assert_eq!(sup_distance(&f, &g), rat(1, 3));
}

#[test]
fn delta_three_certificate() {
    let d = construct_delta_n(3, &rat(1, 8), &rat(1, 100)).unwrap();
    let c = separation_certificate(&d.polyhedron).unwrap();
    // recorded from an exact run
    assert_eq!(c.eps, rat(64, 1075));
    assert_eq!(c.m, rat(215, 48));
    assert_eq!(c.g_min, rat(23, 15));
}

#[test]
fn certificate_under_scaling() {
    let d = construct_delta_n(3, &rat(1, 8), &rat(1, 100)).unwrap();
    let k = &d.polyhedron;
    let k2 = k.scale_normals(&rat(2, 1)).unwrap();
    // M halves and gauges double
    assert_eq!(k2.max_vertex_norm_1().unwrap(), k.max_vertex_norm_1().unwrap() / rat(2, 1));
    for s in k.enumerate_s_in_dilate(&rat(2, 1)).unwrap() {
        assert_eq!(k2.gauge(&s), k.gauge(&s) * rat(2, 1));
    }
    assert_eq!(k2.norm(), k.norm() * rat(2, 1));
}
