#include "vcx/error.hpp"

namespace vcx {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::CorruptImage: return "CorruptImage";
    case Errc::TooManyLevels: return "TooManyLevels";
    case Errc::ImageTooSmall: return "ImageTooSmall";
    case Errc::BoxOutOfBounds: return "BoxOutOfBounds";
    case Errc::EmptyDictionary: return "EmptyDictionary";
    case Errc::NotEnoughImages: return "NotEnoughImages";
    case Errc::UnknownImage: return "UnknownImage";
    case Errc::NoTrials: return "NoTrials";
    case Errc::DegenerateColumn: return "DegenerateColumn";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::SubgroupTooSmall: return "SubgroupTooSmall";
    case Errc::InsufficientBins: return "InsufficientBins";
    case Errc::ViewportTooSmall: return "ViewportTooSmall";
    case Errc::StageClosed: return "StageClosed";
    case Errc::SessionComplete: return "SessionComplete";
    case Errc::SessionRejected: return "SessionRejected";
    case Errc::InvalidToken: return "InvalidToken";
    case Errc::DuplicateResponse: return "DuplicateResponse";
    case Errc::InvalidChoice: return "InvalidChoice";
    case Errc::StageHasActiveSessions: return "StageHasActiveSessions";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace vcx
