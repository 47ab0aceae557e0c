//! Frames produced by a separate reference encoder, checked byte for byte.

use requbis::bus::{decode, encode, parse_hex, BusFrame, Command};

const VECTORS: &str = include_str!("data/bus_vectors.txt");

fn parse_command(desc: &str) -> BusFrame {
    let f: Vec<&str> = desc.split_whitespace().collect();
    let n = |i: usize| f[i].parse::<u64>().unwrap();
    let id = n(1) as u8;
    match f[0] {
        "ping" => BusFrame { id, command: Command::Ping },
        "read" => BusFrame { id, command: Command::Read { address: n(2) as u8, count: n(3) as u8 } },
        "position" => BusFrame { id, command: Command::WritePosition { ticks: n(2) as u16 } },
        "position_velocity" => {
            BusFrame { id, command: Command::WritePositionVelocity { ticks: n(2) as u16, velocity: n(3) as u16 } }
        }
        "angle" => BusFrame::position(id, f[2].parse().unwrap()).unwrap(),
        other => panic!("unknown vector kind {other}"),
    }
}

#[test]
fn vectors_match_bit_exactly() {
    let mut count = 0;
    for line in VECTORS.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let (desc, hex) = line.split_once('|').unwrap();
        let want = parse_hex(hex).unwrap();
        let frame = parse_command(desc);
        assert_eq!(encode(&frame).unwrap(), want, "{desc}");
        assert_eq!(decode(&want).unwrap(), (frame, want.len()), "{desc}");
        count += 1;
    }
    assert_eq!(count, 60);
}
