#!/usr/bin/env python3
"""Regenerates the world, waypoint and drive-tape fixtures under data/.

Worlds are unions of free rectangles on a 0.25 m grid; everything else is wall.
Tapes are rotate-then-drive legs whose step counts divide each leg exactly.
"""

import argparse
import math
import pathlib

CELL = 0.25
DT = 0.1


def render_world(path, free, bounds, start, obstacles=(), comment=""):
    x0, y0, x1, y1 = bounds
    cols = round((x1 - x0) / CELL)
    rows = round((y1 - y0) / CELL)

    def is_free(cx, cy):
        return any(a < cx < b and c < cy < d for a, c, b, d in free)

    lines = ["WORLD 1"]
    if comment:
        lines.append(f"# {comment}")
    lines += [f"resolution {CELL}", f"origin {x0} {y0} 0", f"start {start[0]} {start[1]} {start[2]}"]
    for ob in obstacles:
        lines.append("obstacle " + " ".join(str(v) for v in ob))
    lines.append(f"grid {rows} {cols}")
    for r in reversed(range(rows)):
        row = []
        for c in range(cols):
            border = r in (0, rows - 1) or c in (0, cols - 1)
            cx = x0 + (c + 0.5) * CELL
            cy = y0 + (r + 0.5) * CELL
            row.append("." if not border and is_free(cx, cy) else "#")
        lines.append("".join(row))
    path.write_text("\n".join(lines) + "\n")


def render_waypoints(path, wps):
    lines = ["WAYPOINTS 1"] + [f"wp {x!r} {y!r} {yaw!r}" for x, y, yaw in wps]
    path.write_text("\n".join(lines) + "\n")


def wrap(a):
    return math.remainder(a, 2 * math.pi)


def render_tape(path, route, v_max=0.4, w_max=0.5):
    x, y, th = route[0]
    lines = ["TAPE 1", f"dt {DT}"]
    for tx, ty in route[1:]:
        dist = math.hypot(tx - x, ty - y)
        if dist < 1e-9:
            continue
        turn = wrap(math.atan2(ty - y, tx - x) - th)
        if abs(turn) > 1e-9:
            k = math.ceil(abs(turn) / (w_max * DT))
            lines.append(f"cmd 0 {turn / (k * DT):.12g} {k}")
            th = wrap(th + turn)
        k = math.ceil(dist / (v_max * DT))
        lines.append(f"cmd {dist / (k * DT):.12g} 0 {k}")
        x, y = tx, ty
    lines.append("cmd 0 0 5")
    path.write_text("\n".join(lines) + "\n")


def desk(out):
    free = [
        (-1.25, -1.25, 22.75, 1.25),  # south corridor
        (-1.25, 10.25, 22.75, 12.75),  # north corridor
        (-1.25, -1.25, 1.25, 12.75),  # west corridor
        (20.25, -1.25, 22.75, 12.75),  # east corridor
        (9.5, -1.25, 12.0, 12.75),  # cross corridor
        (3.0, 3.0, 8.0, 8.5),  # room
        (8.0, 5.0, 9.5, 6.5),  # door
        (6.0, 8.75, 9.5, 10.0),  # dead-end alcove
        # wall recesses
        (3.0, -1.75, 4.0, -1.25),
        (13.5, -1.75, 15.0, -1.25),
        (5.0, 12.75, 6.5, 13.25),
        (16.0, 12.75, 17.0, 13.25),
        (-1.75, 4.0, -1.25, 5.0),
        (22.75, 2.5, 23.25, 3.5),
        (22.75, 8.0, 23.25, 9.0),
        (6.0, 1.25, 7.0, 1.75),
        (16.0, 1.25, 17.5, 1.75),
        (3.5, 9.75, 4.5, 10.25),
        (14.0, 9.75, 15.0, 10.25),
    ]
    render_world(out / "desk.world", free, (-2.25, -2.25, 23.75, 13.75), (0, 0, 0),
                 comment="reduced ring tunnel with a cross corridor, a room and a dead-end alcove")
    render_waypoints(out / "desk.wp", [
        (8.0, 0.0, math.pi / 2),
        (21.5, 11.0, math.pi),
        (10.75, 7.5, 0.0),
        (5.0, 5.75, math.pi / 2),
        (6.6, 9.29, math.pi / 2),
        (0.0, 0.0, 0.0),
    ])
    render_tape(out / "desk.tape", [
        (0, 0, 0), (10.75, 0), (10.75, 5.75), (5.5, 5.75), (10.75, 5.75), (10.75, 9.3), (6.8, 9.3), (10.75, 9.3),
        (10.75, 11.5), (21.5, 11.5), (21.5, 0), (0, 0), (0, 11.5), (9.0, 11.5),
    ])


def tunnel(out):
    free = [
        (-1.25, -1.25, 38.75, 1.25),
        (-1.25, 16.25, 38.75, 18.75),
        (-1.25, -1.25, 1.25, 18.75),
        (36.25, -1.25, 38.75, 18.75),
        (17.5, -1.25, 20.0, 18.75),  # cross corridor
        (4.0, 4.0, 10.0, 13.0),  # west room
        (10.0, 8.0, 17.5, 9.5),  # west room door passage
        (24.0, 5.0, 32.0, 11.0),  # east room
        (20.0, 7.25, 24.0, 8.75),  # east room door passage
        (32.5, 13.25, 36.25, 14.25),  # alcove
        (-1.75, 6.0, -1.25, 7.0),
        (6.0, -1.75, 7.5, -1.25),
        (27.0, -1.75, 28.0, -1.25),
        (12.0, 18.75, 13.0, 19.25),
        (30.0, 18.75, 31.5, 19.25),
        (38.75, 4.0, 39.25, 5.0),
        (38.75, 10.0, 39.25, 11.5),
        (12.0, 1.25, 13.5, 1.75),
        (25.0, 15.75, 26.0, 16.25),
    ]
    render_world(out / "tunnel.world", free, (-2.25, -2.25, 39.75, 19.75), (0, 0, 0),
                 obstacles=[(0.25, 0.3, 18.75, 3.0, 18.75, 14.0)],
                 comment="full ring tunnel with two rooms, an alcove and a patrolling obstacle")
    render_waypoints(out / "tunnel.wp", [
        (6.0, 0.0, 0.0),
        (15.0, 0.0, 0.0),
        (18.0, 5.0, math.pi / 2),  # beside the patrol line, which blocks any goal on it
        (26.0, 8.0, 0.0),
        (30.0, 8.0, 0.0),
        (37.5, 3.0, math.pi / 2),
        (37.5, 9.0, math.pi / 2),
        (33.1, 13.75, math.pi),
        (37.5, 17.5, math.pi),
        (28.0, 17.5, math.pi),
        (18.0, 13.0, -math.pi / 2),
        (8.0, 8.75, math.pi),
        (6.0, 11.0, math.pi / 2),
        (0.0, 12.0, -math.pi / 2),
        (0.0, 0.0, 0.0),
    ])
    render_tape(out / "tunnel.tape", [
        (0, 0, 0), (18.75, 0), (18.75, 8.75), (7.0, 8.75), (18.75, 8.75), (18.75, 8.0), (28.0, 8.0), (18.75, 8.0),
        (18.75, 17.5), (37.5, 17.5), (37.5, 13.75), (33.5, 13.75), (37.5, 13.75), (37.5, 0), (0, 0),
        (0, 17.5), (16.0, 17.5),
    ])


def openfield(out):
    free = [(-29.75, -29.75, 29.75, 29.75)]
    global CELL
    saved, CELL = CELL, 0.5
    try:
        render_world(out / "openfield.world", free, (-30.0, -30.0, 30.0, 30.0), (0, 0, 0),
                     comment="walls beyond sensor range of every waypoint")
    finally:
        CELL = saved
    render_waypoints(out / "openfield.wp", [
        (3.0, 0.0, 0.0),
        (3.0, 3.0, math.pi / 2),
        (-2.0, 4.0, math.pi),
        (0.0, 0.0, 0.0),
    ])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    desk(out)
    tunnel(out)
    openfield(out)


if __name__ == "__main__":
    main()
