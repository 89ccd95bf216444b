"""Action and event registries.

The action space has 48 members and the event taxonomy 23. Members not wired
to a handler are inert: they are valid to log but no twin reacts to them.
"""

from __future__ import annotations

from enum import Enum


class ActionCategory(str, Enum):
    CONSUMPTION = "consumption"
    ENGAGEMENT = "engagement"
    SOCIAL = "social"
    NAVIGATION = "navigation"
    CREATION = "creation"
    COMMERCE = "commerce"
    GROUP = "group"
    LIVE = "live"


_C = ActionCategory


class ActionType(str, Enum):
    # value, category
    def __new__(cls, value: str, category: ActionCategory):
        obj = str.__new__(cls, value)
        obj._value_ = value
        obj.category = category
        return obj

    WATCH_VIDEO = ("WATCH_VIDEO", _C.CONSUMPTION)
    SKIP_VIDEO = ("SKIP_VIDEO", _C.CONSUMPTION)
    REFRESH = ("REFRESH", _C.CONSUMPTION)
    REWATCH_VIDEO = ("REWATCH_VIDEO", _C.CONSUMPTION)
    PAUSE_VIDEO = ("PAUSE_VIDEO", _C.CONSUMPTION)

    LIKE = ("LIKE", _C.ENGAGEMENT)
    UNLIKE = ("UNLIKE", _C.ENGAGEMENT)
    SHARE = ("SHARE", _C.ENGAGEMENT)
    COMMENT = ("COMMENT", _C.ENGAGEMENT)
    LIKE_COMMENT = ("LIKE_COMMENT", _C.ENGAGEMENT)
    REPLY_COMMENT = ("REPLY_COMMENT", _C.ENGAGEMENT)
    DUET = ("DUET", _C.ENGAGEMENT)
    STITCH = ("STITCH", _C.ENGAGEMENT)
    SAVE_VIDEO = ("SAVE_VIDEO", _C.ENGAGEMENT)

    FOLLOW = ("FOLLOW", _C.SOCIAL)
    UNFOLLOW = ("UNFOLLOW", _C.SOCIAL)
    SEND_GIFT = ("SEND_GIFT", _C.SOCIAL)
    BLOCK_USER = ("BLOCK_USER", _C.SOCIAL)
    MUTE_USER = ("MUTE_USER", _C.SOCIAL)
    REPORT_CONTENT = ("REPORT_CONTENT", _C.SOCIAL)
    SEND_MESSAGE = ("SEND_MESSAGE", _C.SOCIAL)
    MENTION_USER = ("MENTION_USER", _C.SOCIAL)

    SEARCH_USER = ("SEARCH_USER", _C.NAVIGATION)
    SEARCH_POSTS = ("SEARCH_POSTS", _C.NAVIGATION)
    SEARCH_HASHTAG = ("SEARCH_HASHTAG", _C.NAVIGATION)
    VIEW_PROFILE = ("VIEW_PROFILE", _C.NAVIGATION)
    OPEN_TRENDING = ("OPEN_TRENDING", _C.NAVIGATION)
    NOT_INTERESTED = ("NOT_INTERESTED", _C.NAVIGATION)
    EXIT = ("EXIT", _C.NAVIGATION)

    CREATE_VIDEO = ("CREATE_VIDEO", _C.CREATION)
    DELETE_VIDEO = ("DELETE_VIDEO", _C.CREATION)
    EDIT_CAPTION = ("EDIT_CAPTION", _C.CREATION)
    CREATE_POST = ("CREATE_POST", _C.CREATION)
    UPLOAD_SOUND = ("UPLOAD_SOUND", _C.CREATION)
    SCHEDULE_VIDEO = ("SCHEDULE_VIDEO", _C.CREATION)

    VIEW_PRODUCT = ("VIEW_PRODUCT", _C.COMMERCE)
    ADD_TO_CART = ("ADD_TO_CART", _C.COMMERCE)
    PURCHASE = ("PURCHASE", _C.COMMERCE)
    REDEEM_COUPON = ("REDEEM_COUPON", _C.COMMERCE)
    SUBSCRIBE_CREATOR = ("SUBSCRIBE_CREATOR", _C.COMMERCE)

    CREATE_GROUP = ("CREATE_GROUP", _C.GROUP)
    JOIN_GROUP = ("JOIN_GROUP", _C.GROUP)
    LEAVE_GROUP = ("LEAVE_GROUP", _C.GROUP)
    POST_IN_GROUP = ("POST_IN_GROUP", _C.GROUP)

    START_LIVE = ("START_LIVE", _C.LIVE)
    JOIN_LIVE = ("JOIN_LIVE", _C.LIVE)
    LEAVE_LIVE = ("LEAVE_LIVE", _C.LIVE)
    END_LIVE = ("END_LIVE", _C.LIVE)


class EventSource(str, Enum):
    USER_TO_INTERACTION = "user->interaction"
    INTERACTION_TO_CONTENT_USER = "interaction->content/user"
    PLATFORM_TO_ALL = "platform->*"


_S = EventSource


class EventType(str, Enum):
    def __new__(cls, value: str, source_category: EventSource):
        obj = str.__new__(cls, value)
        obj._value_ = value
        obj.source_category = source_category
        return obj

    ACTION_SUBMITTED = ("ACTION_SUBMITTED", _S.USER_TO_INTERACTION)
    SESSION_STARTED = ("SESSION_STARTED", _S.USER_TO_INTERACTION)
    SESSION_ENDED = ("SESSION_ENDED", _S.USER_TO_INTERACTION)
    USER_FOLLOWED = ("USER_FOLLOWED", _S.USER_TO_INTERACTION)
    USER_UNFOLLOWED = ("USER_UNFOLLOWED", _S.USER_TO_INTERACTION)

    VIDEO_WATCHED = ("VIDEO_WATCHED", _S.INTERACTION_TO_CONTENT_USER)
    VIDEO_SKIPPED = ("VIDEO_SKIPPED", _S.INTERACTION_TO_CONTENT_USER)
    VIDEO_ENGAGED = ("VIDEO_ENGAGED", _S.INTERACTION_TO_CONTENT_USER)
    GIFT_SENT = ("GIFT_SENT", _S.INTERACTION_TO_CONTENT_USER)
    PURCHASE_COMPLETED = ("PURCHASE_COMPLETED", _S.INTERACTION_TO_CONTENT_USER)
    PREFERENCE_UPDATED = ("PREFERENCE_UPDATED", _S.INTERACTION_TO_CONTENT_USER)
    MEMORY_REINFORCED = ("MEMORY_REINFORCED", _S.INTERACTION_TO_CONTENT_USER)

    CONTENT_CREATED = ("CONTENT_CREATED", _S.PLATFORM_TO_ALL)
    FEED_SERVED = ("FEED_SERVED", _S.PLATFORM_TO_ALL)
    STAGE_TRANSITION = ("STAGE_TRANSITION", _S.PLATFORM_TO_ALL)
    VIDEO_GOES_VIRAL = ("VIDEO_GOES_VIRAL", _S.PLATFORM_TO_ALL)
    TREND_UPDATED = ("TREND_UPDATED", _S.PLATFORM_TO_ALL)
    TREND_FORECAST = ("TREND_FORECAST", _S.PLATFORM_TO_ALL)
    GOVERNANCE_ACTION = ("GOVERNANCE_ACTION", _S.PLATFORM_TO_ALL)
    CAMPAIGN_PLANNED = ("CAMPAIGN_PLANNED", _S.PLATFORM_TO_ALL)
    BUDGET_THRESHOLD_CROSSED = ("BUDGET_THRESHOLD_CROSSED", _S.PLATFORM_TO_ALL)
    BUDGET_EXCEEDED = ("BUDGET_EXCEEDED", _S.PLATFORM_TO_ALL)
    CHECKPOINT = ("CHECKPOINT", _S.PLATFORM_TO_ALL)


# Members with no subscriber in the default wiring.
INERT_EVENTS = frozenset({EventType.USER_UNFOLLOWED, EventType.PREFERENCE_UPDATED, EventType.MEMORY_REINFORCED})

# Actions the rule policy and platform handlers actually execute.
ACTIVE_ACTIONS = frozenset(
    {
        ActionType.WATCH_VIDEO,
        ActionType.SKIP_VIDEO,
        ActionType.REFRESH,
        ActionType.LIKE,
        ActionType.SHARE,
        ActionType.COMMENT,
        ActionType.FOLLOW,
        ActionType.SEND_GIFT,
        ActionType.PURCHASE,
        ActionType.EXIT,
        ActionType.CREATE_VIDEO,
    }
)
