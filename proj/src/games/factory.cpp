#include "klr/core/match.hpp"
#include "klr/games/g08a.hpp"
#include "klr/games/neg.hpp"
#include "klr/games/pd.hpp"
#include "klr/games/sag.hpp"

namespace klr {

std::unique_ptr<GameEngine> make_engine(GameKind kind) {
  switch (kind) {
    case GameKind::G08A: return std::make_unique<G08AEngine>();
    case GameKind::SAG: return std::make_unique<SAGEngine>();
    case GameKind::NEG: return std::make_unique<NEGEngine>();
    case GameKind::PD: return std::make_unique<PDEngine>();
  }
  throw std::logic_error("make_engine: unknown game");
}

}  // namespace klr
