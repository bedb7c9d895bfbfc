"""A scripted IMAP-subset server with a one-mailbox world.

Keeps 'INBOX' with three messages; 'NOBOX' can be created, deleted,
renamed and copied into.  Tagged responses echo the client's tag.  All
replies are fixed text, so a session is a pure function of the command
sequence.

The --bug select-after-delete-inbox behavior reproduces a classic server
defect: after a (correctly) refused DELETE INBOX, subsequent SELECT INBOX
is wrongly refused too.  Both refusals are legal per the interaction
model, which is exactly why a pure trace/format tester cannot flag it.
"""

from __future__ import annotations

from .. import channel as chan
from ..errors import ChannelError
from . import StreamReader

BUG_SELECT_AFTER_DELETE_INBOX = "select-after-delete-inbox"

_CREDENTIALS = ("tester", "sesame")
_MAILBOX_CAP = 4


class MiniImapServer:
    def __init__(self, ch: chan.Channel, bug: str | None = None):
        self.ch = ch
        self.bug = bug
        self.reader = StreamReader(ch)
        self.mailboxes = {"INBOX": [{"\\Seen"}, set(), {"\\Flagged"}]}
        self.authed = False
        self.selected = None
        self.inbox_delete_refused = False

    # --- wire helpers ---------------------------------------------------------

    def _line(self, text: str):
        self.ch.send(text.encode("ascii") + b"\r\n")

    def _ok(self, tag: str, text: str = "done"):
        self._line(f"{tag} OK {text}")

    def _no(self, tag: str, text: str = "refused"):
        self._line(f"{tag} NO {text}")

    def _greet(self):
        self._line("* OK mini server ready")

    # --- main loop --------------------------------------------------------------

    def serve(self):
        self._greet()
        while True:
            line = self.reader.read_line(b"\r\n")
            if line is None:
                return
            try:
                text = line.decode("ascii")
            except UnicodeDecodeError:
                continue
            parts = text.split(" ")
            if len(parts) < 2:
                continue
            tag, name, args = parts[0], parts[1], parts[2:]
            handler = getattr(self, "_cmd_" + name.lower(), None)
            if handler is None:
                self._line(f"{tag} BAD unknown command")
                continue
            handler(tag, args)

    # --- commands ---------------------------------------------------------------

    def _cmd_login(self, tag: str, args: list):
        if len(args) == 2 and tuple(args) == _CREDENTIALS:
            self.authed = True
            self._ok(tag, "logged in")
        else:
            self._no(tag, "bad credentials")

    def _cmd_select(self, tag: str, args: list):
        mailbox = args[0] if args else ""
        blocked = (
            self.bug == BUG_SELECT_AFTER_DELETE_INBOX
            and mailbox == "INBOX"
            and self.inbox_delete_refused
        )
        if mailbox in self.mailboxes and not blocked:
            msgs = self.mailboxes[mailbox]
            self._line(f"* {len(msgs)} EXISTS total")
            self._line("* 0 RECENT none")
            self.selected = mailbox
            self._ok(tag, "selected")
        else:
            self._no(tag, "no such mailbox")

    def _cmd_examine(self, tag: str, args: list):
        if args and args[0] in self.mailboxes:
            self._ok(tag, "examined")
        else:
            self._no(tag, "no such mailbox")

    def _cmd_create(self, tag: str, args: list):
        mailbox = args[0] if args else ""
        if mailbox and mailbox not in self.mailboxes:
            self.mailboxes[mailbox] = []
            self._ok(tag, "created")
        else:
            self._no(tag, "already exists")

    def _cmd_delete(self, tag: str, args: list):
        mailbox = args[0] if args else ""
        if mailbox == "INBOX":
            self.inbox_delete_refused = True
            self._no(tag, "INBOX cannot be deleted")
        elif mailbox == self.selected:
            self._no(tag, "mailbox is selected")
        elif mailbox in self.mailboxes:
            del self.mailboxes[mailbox]
            self._ok(tag, "deleted")
        else:
            self._no(tag, "no such mailbox")

    def _cmd_rename(self, tag: str, args: list):
        old = args[0] if args else ""
        new = args[1] if len(args) > 1 else ""
        if (
            old in self.mailboxes
            and old not in ("INBOX", self.selected)
            and new
            and new != old
        ):
            self.mailboxes[new] = self.mailboxes.pop(old)
            self._ok(tag, "renamed")
        else:
            self._no(tag, "cannot rename")

    def _seq(self, args: list) -> int | None:
        if self.selected is None or not args:
            return None
        try:
            seq = int(args[0])
        except ValueError:
            return None
        if 1 <= seq <= len(self.mailboxes[self.selected]):
            return seq
        return None

    def _flags_info(self, seq: int) -> str:
        flags = sorted(self.mailboxes[self.selected][seq - 1])
        return "(FLAGS (" + " ".join(flags) + "))"

    def _cmd_fetch(self, tag: str, args: list):
        seq = self._seq(args)
        if seq is None:
            self._no(tag, "no such message")
            return
        self._line(f"* {seq} FETCH {self._flags_info(seq)}")
        self._ok(tag, "fetch done")

    def _cmd_store(self, tag: str, args: list):
        seq = self._seq(args)
        if seq is None or len(args) < 3:
            self._no(tag, "no such message")
            return
        action, flag = args[1], args[2]
        flags = self.mailboxes[self.selected][seq - 1]
        if action == "+FLAGS":
            flags.add(flag)
        elif action == "-FLAGS":
            flags.discard(flag)
        else:
            self._no(tag, "bad store action")
            return
        self._line(f"* {seq} FETCH {self._flags_info(seq)}")
        self._ok(tag, "store done")

    def _cmd_copy(self, tag: str, args: list):
        seq = self._seq(args)
        target = args[1] if len(args) > 1 else ""
        if (
            seq is not None
            and target in self.mailboxes
            and len(self.mailboxes[target]) < _MAILBOX_CAP
        ):
            self.mailboxes[target].append(set(self.mailboxes[self.selected][seq - 1]))
            self._ok(tag, "copied")
        else:
            self._no(tag, "cannot copy")

    def _cmd_close(self, tag: str, args: list):
        if self.selected is not None:
            self.selected = None
            self._ok(tag, "closed")
        else:
            self._no(tag, "nothing selected")

    def _cmd_logout(self, tag: str, args: list):
        self._line("* BYE logging out")
        self._ok(tag, "logout done")
        # the session stays open and restarts from the greeting
        self.authed = False
        self.selected = None
        self._greet()


def run_mini_imap(ch: chan.Channel, bug: str | None = None):
    try:
        MiniImapServer(ch, bug).serve()
    except ChannelError:
        return
