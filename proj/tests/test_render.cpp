#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "evdrive/render.hpp"

using namespace evdrive;

namespace {

WorldState simple_world() {
    WorldState w;
    w.ego.x = 0;
    w.ego.y = 0;
    Actor car;
    car.id = 1;
    car.kind = ActorKind::Vehicle;
    car.x = 10;
    car.y = 0;
    Actor ped;
    ped.id = 2;
    ped.kind = ActorKind::Pedestrian;
    ped.x = 5;
    ped.y = 5;
    ped.half_w = 0.4;
    ped.half_l = 0.4;
    w.actors = {car, ped};
    return w;
}

}  // namespace

TEST_SUITE("render") {

TEST_CASE("empty world renders a uniform background") {
    WorldState w;
    w.ego.x = 1000;  // ego outside the camera window
    CameraConfig cam;
    cam.center = {0, 0};
    cam.span = 40;
    cam.width = 32;
    cam.height = 32;
    PhysicsParams phys;
    IntensityFrame f = render_intensity(w, cam, phys);
    std::set<double> shades(f.data.begin(), f.data.end());
    CHECK(shades.size() == 1);
    CHECK(*shades.begin() > 0.0);   // log-safe floor
    CHECK(*shades.begin() < 0.5);   // background is dark
}

TEST_CASE("same world twice renders identical pixels") {
    WorldState w = simple_world();
    CameraConfig cam;
    cam.center = {5, 0};
    PhysicsParams phys;
    IntensityFrame a = render_intensity(w, cam, phys);
    IntensityFrame b = render_intensity(w, cam, phys);
    CHECK(a.data == b.data);
}

TEST_CASE("actors brighten their footprint pixels, kind-coded") {
    WorldState w = simple_world();
    CameraConfig cam;
    cam.center = {5, 0};
    cam.span = 40;
    cam.width = 128;
    cam.height = 128;
    PhysicsParams phys;
    IntensityFrame f = render_intensity(w, cam, phys);
    // Pixel under the vehicle center: world (10,0) -> offset (5,0) from
    // center at 3.2 px/m -> pixel (64+16, 64).
    const double ppm = cam.width / cam.span;
    auto pixel_of = [&](double wx, double wy) {
        int px = static_cast<int>(std::floor((wx - cam.center.x) * ppm + cam.width / 2.0));
        int py = static_cast<int>(std::floor(cam.height / 2.0 - (wy - cam.center.y) * ppm));
        return std::pair<int, int>{px, py};
    };
    auto [vx, vy] = pixel_of(10, 0);
    auto [px, py] = pixel_of(5, 5);
    auto [ex, ey] = pixel_of(0, 0);
    auto [bx, by] = pixel_of(5, -15);
    const double vehicle = f.at(vx, vy);
    const double ped = f.at(px, py);
    const double ego = f.at(ex, ey);
    const double road = f.at(bx, by);
    CHECK(road < ego);
    CHECK(ego < vehicle);
    CHECK(vehicle < ped);        // pedestrians brightest: small but visible
    CHECK(ped == doctest::Approx(1.0));
    // All shades within the declared luminance range.
    for (double v : f.data) {
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("moving an actor changes only silhouette-adjacent columns") {
    WorldState w = simple_world();
    w.actors.pop_back();  // keep the vehicle only
    CameraConfig cam;
    cam.center = {10, 0};
    cam.span = 32;
    cam.width = 64;
    cam.height = 64;
    PhysicsParams phys;
    w.ego.x = -100;  // out of frame so only the actor draws
    IntensityFrame before = render_intensity(w, cam, phys);
    const double ppm = cam.width / cam.span;  // 2 px per meter
    w.actors[0].x += 1.0 / ppm;               // shift right by exactly one pixel
    IntensityFrame after = render_intensity(w, cam, phys);
    int diff_cols_lo = cam.width, diff_cols_hi = -1;
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x)
            if (before.at(x, y) != after.at(x, y)) {
                diff_cols_lo = std::min(diff_cols_lo, x);
                diff_cols_hi = std::max(diff_cols_hi, x);
            }
    REQUIRE(diff_cols_hi >= 0);  // something changed
    // The changed region is exactly the two columns entering/leaving the
    // silhouette on each side.
    const Obb box = w.actors[0].footprint();
    const double half_l_px = box.half_l * ppm;
    const double width_px = 2 * half_l_px + 1;
    CHECK(diff_cols_hi - diff_cols_lo + 1 <= width_px + 2);
}

TEST_CASE("ego camera leads the vehicle") {
    EgoState ego;
    ego.x = 4;
    ego.y = 2;
    ego.yaw = 0.0;
    CameraConfig cam = ego_camera(ego, 40.0, 128, 128);
    CHECK(cam.center.x == doctest::Approx(14.0));
    CHECK(cam.center.y == doctest::Approx(2.0));
    // Rotates with the ego.
    ego.yaw = 3.141592653589793 / 2;
    cam = ego_camera(ego, 40.0, 128, 128);
    CHECK(cam.center.x == doctest::Approx(4.0));
    CHECK(cam.center.y == doctest::Approx(12.0));
}

TEST_CASE("camera validation") {
    WorldState w;
    PhysicsParams phys;
    CameraConfig cam;
    cam.span = 0.0;
    CHECK_THROWS_AS(render_intensity(w, cam, phys), std::invalid_argument);
    cam.span = 40;
    cam.width = 2048;
    CHECK_THROWS_AS(render_intensity(w, cam, phys), std::invalid_argument);
}

TEST_CASE("parallel renderer matches the serial reference bit for bit") {
    WorldState w = simple_world();
    w.ego.yaw = 0.3;
    w.actors[0].yaw = -0.7;
    PhysicsParams phys;
    for (int size : {33, 128}) {
        CameraConfig cam;
        cam.center = {6, 1};
        cam.span = 37.5;
        cam.width = size;
        cam.height = size;
        IntensityFrame par = render_intensity(w, cam, phys);
        IntensityFrame ser = serial::render_intensity(w, cam, phys);
        REQUIRE(par.data.size() == ser.data.size());
        CHECK(par.data == ser.data);  // exact equality, not approximate
        CHECK(par.t_us == ser.t_us);
    }
}

}  // TEST_SUITE
