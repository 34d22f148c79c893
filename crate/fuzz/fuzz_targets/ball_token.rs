//! Fuzz the canonical-code token parsers: accepted tokens must be exactly
//! the canonical serializations, and the decoded structures must support
//! the full ball algebra without panicking.

#![no_main]

use libfuzzer_sys::fuzz_target;
use locallim::ball::BallCode;
use locallim::directed::{edge_ball_within, orientations, EdgeBall, VecBall};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ball) = BallCode::parse_token(s) {
        assert_eq!(ball.token(), s, "accepted tokens are canonical");
        if !ball.is_oversized_bucket() {
            let g = ball.to_graph();
            assert_eq!(g.n(), ball.vertex_count());
            if ball.radius() >= 1 && ball.vertex_count() <= 64 {
                let ors = orientations(&ball);
                let total: u32 = ors.iter().map(|(_, l)| *l).sum();
                assert_eq!(total, ball.root_degree());
                for (vb, _) in ors {
                    let eb = edge_ball_within(&vb).unwrap();
                    assert_eq!(eb.involute().involute(), eb);
                }
            }
            if ball.radius() >= 1 {
                let t = ball.truncate(ball.radius() - 1).unwrap();
                assert!(t.vertex_count() <= ball.vertex_count());
            }
        }
    }
    if let Ok(vb) = VecBall::parse_token(s) {
        assert_eq!(vb.token(), s);
        if !vb.is_stub() && vb.vertex_count() <= 64 {
            assert!(vb.multiplicity() >= 1);
            let eb = edge_ball_within(&vb).unwrap();
            assert_eq!(eb.involute().involute(), eb);
        }
    }
    if let Ok(eb) = EdgeBall::parse_token(s) {
        assert_eq!(eb.token(), s);
        if eb.vertex_count() <= 64 {
            assert_eq!(eb.involute().involute(), eb);
            assert_eq!(eb.involute().s_view(), eb.t_view());
            assert_eq!(eb.involute().t_view(), eb.s_view());
        }
    }
});
