/**
 * Generated from archetype PROFILE.
 * Identifier: profileId.
 */
public class Profile {

    /** Object identifier. */
    private int profileId;
    public String bio;
}
