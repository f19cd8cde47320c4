use crate::game::Game;

/// The 3x3 illustrative game.
pub fn illustrative() -> Game {
    Game::from_int_table(
        &[3, 3],
        &[
            &[100, 100],
            &[0, 102],
            &[0, 102],
            &[102, 0],
            &[1, 2],
            &[0, 0],
            &[102, 0],
            &[0, 0],
            &[3, 1],
        ],
    )
    .unwrap()
}

/// 3x3 game where punishments separate full from partial information.
pub fn info_gap_game() -> Game {
    Game::from_int_table(
        &[3, 3],
        &[
            &[100, 100],
            &[101, 101],
            &[1, 1],
            &[101, 101],
            &[1, 1],
            &[2, 103],
            &[1, 1],
            &[103, 2],
            &[1, 1],
        ],
    )
    .unwrap()
}

/// 2x2 game where an equilibrium shares its payoff vector with a
/// non-equilibrium.
pub fn shared_payoffs() -> Game {
    Game::from_int_table(&[2, 2], &[&[1, 1], &[1, 1], &[0, 0], &[2, 2]]).unwrap()
}
